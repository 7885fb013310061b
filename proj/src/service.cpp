#include "doorcount/service.hpp"

#include <algorithm>

#include "json.hpp"

namespace doorcount {

using nlohmann::ordered_json;

std::optional<ControlAction> control_action_from_string(std::string_view s) {
    if (s == "start") return ControlAction::Start;
    if (s == "stop") return ControlAction::Stop;
    if (s == "reset") return ControlAction::Reset;
    if (s == "clear_logs") return ControlAction::ClearLogs;
    return std::nullopt;
}

CounterService::CounterService(ServiceConfig cfg, std::unique_ptr<FrameSource> source)
    : cfg_(std::move(cfg)), source_(std::move(source)), dims_(source_->dims()), queue_(cfg_.queue_capacity) {
    engine_ = std::make_unique<CountingEngine>(
        cfg_.engine, dims_, cfg_.log_dir ? std::optional<LogPaths>(LogPaths::under(*cfg_.log_dir)) : std::nullopt);

    auto initial = std::make_shared<ServiceStatus>();
    initial->source = source_->describe();
    initial->counts.counts = engine_->state().counts;
    initial->occupancy_consistent = occupancy_consistent(engine_->state());
    status_ = std::move(initial);

    consumer_ = std::thread([this] { consumer_loop(); });
    producer_ = std::thread([this] { producer_loop(); });
    if (cfg_.autostart) control(ControlAction::Start);
}

CounterService::~CounterService() {
    {
        std::lock_guard lk(run_m_);
        shutdown_ = true;
    }
    run_cv_.notify_all();
    queue_.close();
    if (producer_.joinable()) producer_.join();
    if (consumer_.joinable()) consumer_.join();
}

void CounterService::producer_loop() {
    while (true) {
        {
            std::unique_lock lk(run_m_);
            if (!running_ && !shutdown_) {
                producer_paused_ = true;
                quiet_cv_.notify_all();
                run_cv_.wait(lk, [&] { return running_ || shutdown_; });
                if (!shutdown_) {
                    producer_paused_ = false;
                    source_->rebase_clock();
                }
            }
            if (shutdown_) break;
            producer_paused_ = false;
        }

        std::optional<DepthFrame> frame;
        std::string failure;
        try {
            frame = source_->next_frame();
        } catch (const std::exception& e) {
            failure = e.what();
        }

        if (!frame) {
            {
                std::lock_guard lk(run_m_);
                source_done_ = true;
                running_ = false;
            }
            if (!failure.empty()) publish([&](ServiceStatus& s) { s.source_error = failure; });
            queue_.close();
            break;
        }

        {
            std::lock_guard lk(run_m_);
            ++produced_;
        }
        if (source_->paced())
            queue_.push_drop_oldest(std::move(*frame));
        else if (!queue_.push_wait(std::move(*frame)))
            break;
        quiet_cv_.notify_all();
    }
    std::lock_guard lk(run_m_);
    producer_paused_ = true;
    quiet_cv_.notify_all();
}

void CounterService::consumer_loop() {
    auto last_frame_time = std::chrono::steady_clock::now();
    double fps = 0.0;
    bool finished_published = false;
    std::uint64_t since_flush = 0;

    while (true) {
        std::deque<std::pair<Command, std::promise<void>>> pending;
        {
            std::lock_guard lk(cmd_m_);
            pending.swap(commands_);
        }
        for (auto& [cmd, done] : pending) {
            try {
                cmd(*engine_);
                done.set_value();
            } catch (...) {
                done.set_exception(std::current_exception());
            }
        }

        {
            std::lock_guard lk(run_m_);
            if (shutdown_) break;
        }

        auto frame = queue_.pop_for(std::chrono::milliseconds(5));
        if (frame) {
            try {
                if (auto ev = engine_->process(*frame)) {
                    std::lock_guard lk(events_m_);
                    events_.push_back(*ev);
                    while (events_.size() > cfg_.event_history_limit) events_.pop_front();
                }
            } catch (const std::exception& e) {
                // A frame the engine cannot take means the source is broken.
                {
                    std::lock_guard lk(run_m_);
                    source_done_ = true;
                    running_ = false;
                }
                const std::string what = e.what();
                publish([&](ServiceStatus& s) { s.source_error = what; });
                queue_.close();
            }
            const auto now = std::chrono::steady_clock::now();
            const double dt = std::chrono::duration<double>(now - last_frame_time).count();
            last_frame_time = now;
            if (dt > 0) fps = fps == 0.0 ? 1.0 / dt : 0.95 * fps + 0.05 / dt;
            if (++since_flush >= 30) {
                engine_->flush();
                since_flush = 0;
            }
            {
                std::lock_guard lk(run_m_);
                ++processed_;
            }
            publish_engine_state(fps);
            quiet_cv_.notify_all();
            continue;
        }

        if (!finished_published && queue_.drained()) {
            bool done;
            {
                std::lock_guard lk(run_m_);
                done = source_done_;
            }
            if (done) {
                engine_->flush();
                publish_engine_state(fps);
                publish([](ServiceStatus& s) {
                    s.finished = true;
                    s.running = false;
                });
                finished_published = true;
                quiet_cv_.notify_all();
            }
        } else if (since_flush > 0) {
            engine_->flush();
            since_flush = 0;
        }
    }
    engine_->flush();
}

void CounterService::publish(const std::function<void(ServiceStatus&)>& update) {
    std::lock_guard lk(status_m_);
    auto next = std::make_shared<ServiceStatus>(*status_);
    update(*next);
    status_ = std::move(next);
}

void CounterService::publish_engine_state(double fps) {
    const CounterState& st = engine_->state();
    std::uint64_t produced;
    {
        std::lock_guard lk(run_m_);
        produced = produced_;
    }
    publish([&](ServiceStatus& s) {
        s.frames_produced = produced;
        s.frames_processed = engine_->frames_processed();
        s.frames_dropped = queue_.dropped_total();
        s.counts = {st.counts, engine_->last_timestamp_us()};
        s.last_event_seq = engine_->last_event_seq().value_or(0);
        s.fps_estimate = fps;
        s.occupancy_consistent = occupancy_consistent(st);
        s.degraded = engine_->degraded();
        s.last_error = engine_->last_sink_error();
    });
}

void CounterService::run_command(Command cmd) {
    std::future<void> done;
    {
        std::lock_guard lk(cmd_m_);
        commands_.emplace_back(std::move(cmd), std::promise<void>());
        done = commands_.back().second.get_future();
    }
    done.get();
}

std::shared_ptr<const ServiceStatus> CounterService::status() const {
    std::lock_guard lk(status_m_);
    return status_;
}

ServiceStatus CounterService::control(ControlAction action) {
    switch (action) {
        case ControlAction::Start: {
            bool started = false;
            {
                std::lock_guard lk(run_m_);
                if (!source_done_) {
                    running_ = true;
                    started = true;
                }
            }
            run_cv_.notify_all();
            if (started) publish([](ServiceStatus& s) { s.running = true; });
            break;
        }
        case ControlAction::Stop: {
            {
                std::unique_lock lk(run_m_);
                running_ = false;
                run_cv_.notify_all();
                // Quiescent: producer parked and every produced frame handled.
                quiet_cv_.wait(lk, [&] {
                    return shutdown_ || ((producer_paused_ || source_done_) && queue_.size() == 0 &&
                                         processed_ + queue_.dropped_total() == produced_);
                });
            }
            run_command([](CountingEngine& e) { e.flush(); });
            publish([](ServiceStatus& s) { s.running = false; });
            break;
        }
        case ControlAction::Reset:
            run_command([this](CountingEngine& e) {
                e.reset_counters();
                publish_engine_state(status()->fps_estimate);
            });
            break;
        case ControlAction::ClearLogs:
            run_command([this](CountingEngine& e) {
                e.clear_logs();
                {
                    std::lock_guard lk(events_m_);
                    events_.clear();
                }
                publish_engine_state(status()->fps_estimate);
            });
            break;
    }
    return *status();
}

std::vector<CrossingEvent> CounterService::events_since(std::uint64_t since_seq, std::size_t limit) const {
    std::lock_guard lk(events_m_);
    auto it = std::upper_bound(events_.begin(), events_.end(), since_seq,
                               [](std::uint64_t seq, const CrossingEvent& e) { return seq < e.seq; });
    std::vector<CrossingEvent> out;
    for (; it != events_.end() && out.size() < limit; ++it) out.push_back(*it);
    return out;
}

std::optional<std::vector<std::uint8_t>> CounterService::snapshot(const std::string& id) const {
    const SnapshotStore* store = engine_->snapshots();
    if (!store) return std::nullopt;
    return store->load(id);
}

Report CounterService::report(std::uint64_t from_us, std::uint64_t to_us, std::uint64_t bucket_us) const {
    std::vector<CrossingEvent> copy;
    {
        std::lock_guard lk(events_m_);
        copy.assign(events_.begin(), events_.end());
    }
    return build_report(copy, from_us, to_us, bucket_us);
}

bool CounterService::wait_finished(std::chrono::milliseconds timeout) const {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
        if (status()->finished) return true;
        std::unique_lock lk(run_m_);
        quiet_cv_.wait_for(lk, std::chrono::milliseconds(10));
    }
    return status()->finished;
}

std::string counts_to_json(const CountsSnapshot& c) {
    ordered_json j;
    j["entries"] = c.counts.entries;
    j["exits"] = c.counts.exits;
    j["regret_enter"] = c.counts.regret_enter;
    j["regret_exit"] = c.counts.regret_exit;
    j["occupancy"] = c.counts.occupancy;
    j["timestamp_us"] = c.timestamp_us;
    return j.dump();
}

std::string status_to_json(const ServiceStatus& s) {
    ordered_json j;
    j["running"] = s.running;
    j["finished"] = s.finished;
    j["source"] = s.source;
    j["frames_produced"] = s.frames_produced;
    j["frames_processed"] = s.frames_processed;
    j["frames_dropped"] = s.frames_dropped;
    j["counts"] = ordered_json::parse(counts_to_json(s.counts));
    j["last_event_seq"] = s.last_event_seq;
    j["fps_estimate"] = s.fps_estimate;
    j["occupancy_consistent"] = s.occupancy_consistent;
    j["degraded"] = s.degraded;
    j["last_error"] = s.last_error;
    j["source_error"] = s.source_error;
    return j.dump();
}

}  // namespace doorcount
