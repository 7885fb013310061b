// doorcount: command line front end.
//
//   doorcount serve  --source replay --replay-file in.drf --listen 127.0.0.1:8080 --log-dir logs
//   doorcount gen    --kind entry --rng-seed 7 --out entry.drf
//   doorcount count  in.drf --log-dir logs
//   doorcount report --log-dir logs --bucket 10000000
//
// Every long flag can also come from a key = value file given with
// --config; flags on the command line win.

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "doorcount/config.hpp"
#include "doorcount/counting_engine.hpp"
#include "doorcount/frame_source.hpp"
#include "doorcount/http_api.hpp"
#include "doorcount/logs.hpp"
#include "doorcount/replay_file.hpp"
#include "doorcount/report.hpp"
#include "doorcount/scene_synth.hpp"
#include "doorcount/service.hpp"

using namespace doorcount;

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

/// Turns `key = value` lines into `--key=value` tokens placed ahead of the
/// real arguments, so the command line overrides the file.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::vector<std::string> tokens;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty() || key == "config")
            throw ConfigError(path + ":" + std::to_string(lineno) + ": invalid key '" + key + "'");
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

/// argv with config file tokens spliced in right after the subcommand name.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::optional<std::string> config;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
    }
    if (!config || args.empty()) return args;
    auto tokens = config_tokens(*config);
    args.insert(args.begin() + 1, tokens.begin(), tokens.end());
    return args;
}

struct EngineFlags {
    std::uint32_t threshold_mm = 1000;
    double min_area_frac = 0.01;
    std::uint32_t debounce_frames = 1;
    std::uint32_t idle_timeout_frames = kDefaultIdleTimeoutFrames;
    std::int64_t initial_occupancy = 0;
    std::string crossing_axis = "horizontal";
    std::string roi1, roi2, roi3;
    std::string log_dir;

    void add_to(CLI::App& app) {
        app.add_option("--threshold-mm", threshold_mm, "Foreground depth threshold (mm)")->capture_default_str();
        app.add_option("--min-area-frac", min_area_frac, "Min foreground fraction of a ROI")->capture_default_str();
        app.add_option("--debounce-frames", debounce_frames, "Frames a new state must persist")->capture_default_str();
        app.add_option("--idle-timeout-frames", idle_timeout_frames, "Idle frames before flags clear")
            ->capture_default_str();
        app.add_option("--initial-occupancy", initial_occupancy, "People inside at start")->capture_default_str();
        app.add_option("--crossing-axis", crossing_axis, "horizontal|vertical")->capture_default_str();
        app.add_option("--roi1", roi1, "ROI 1 (inside) as x,y,w,h");
        app.add_option("--roi2", roi2, "ROI 2 (middle) as x,y,w,h");
        app.add_option("--roi3", roi3, "ROI 3 (outside) as x,y,w,h");
        app.add_option("--log-dir", log_dir, "Directory for analysis/event logs and snapshots");
    }

    EngineConfig build(FrameDims dims) const {
        EngineConfig cfg;
        cfg.segmentation = {threshold_mm, min_area_frac, debounce_frames};
        cfg.segmentation.validate();
        cfg.layout = layout(dims);
        cfg.idle_timeout_frames = idle_timeout_frames;
        cfg.initial_occupancy = initial_occupancy;
        return cfg;
    }

    RoiLayout layout(FrameDims dims) const {
        auto rect = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<Rect>(parse_rect(s)); };
        return make_layout(dims, parse_axis(crossing_axis), rect(roi1), rect(roi2), rect(roi3));
    }

    std::optional<LogPaths> logs() const {
        if (log_dir.empty()) return std::nullopt;
        return LogPaths::under(log_dir);
    }
};

struct ScenarioFlags {
    std::string kind = "entry";
    ScenarioSpec spec;
    std::uint32_t width = 640, height = 480;

    void add_to(CLI::App& app, bool with_kind) {
        if (with_kind) {
            app.add_option("--kind", kind, "entry|exit|regret_enter|regret_exit|loiter|empty")->capture_default_str();
            app.add_option("--frame-count", spec.frame_count, "Frames to emit (0 = just enough)")
                ->capture_default_str();
        }
        app.add_option("--camera-height-mm", spec.camera_height_mm)->capture_default_str();
        app.add_option("--person-height-mm", spec.person_height_mm)->capture_default_str();
        app.add_option("--head-radius-px", spec.head_radius_px)->capture_default_str();
        app.add_option("--speed-px-per-frame", spec.speed_px_per_frame)->capture_default_str();
        app.add_option("--start-offset-px", spec.start_offset_px)->capture_default_str();
        app.add_option("--noise-sigma-mm", spec.noise_sigma_mm)->capture_default_str();
        app.add_option("--dropout-prob", spec.dropout_prob)->capture_default_str();
        app.add_option("--rng-seed", spec.rng_seed)->capture_default_str();
        app.add_option("--width", width)->capture_default_str();
        app.add_option("--height", height)->capture_default_str();
    }

    ScenarioSpec resolved() const {
        ScenarioSpec s = spec;
        const auto k = scenario_kind_from_string(kind);
        if (!k) throw ConfigError("unknown scenario kind '" + kind + "'");
        s.kind = *k;
        return s;
    }
    FrameDims dims() const { return {width, height}; }
};

void print_counts(const Counts& c, std::uint64_t frames) {
    std::cout << "entries=" << c.entries << " exits=" << c.exits << " regret_enter=" << c.regret_enter
              << " regret_exit=" << c.regret_exit << " occupancy=" << c.occupancy << " frames=" << frames << "\n";
}

int run_gen(const ScenarioFlags& sf, const EngineFlags& ef, std::uint32_t suite_per_kind, const std::string& out) {
    const FrameDims dims = sf.dims();
    const RoiLayout layout = ef.layout(dims);
    std::vector<ScenarioSpec> specs;
    if (suite_per_kind > 0)
        specs = plan_suite(suite_per_kind, sf.resolved(), sf.spec.rng_seed, layout, dims);
    else
        specs.push_back(with_auto_frame_count(sf.resolved(), layout, dims));

    SyntheticSource source(specs, layout, dims, false);
    ReplayWriter writer(out, dims.width, dims.height);
    while (auto f = source.next_frame()) writer.append(*f);
    writer.finish();
    const ScenarioExpectation e = source.expectation();
    std::cout << "wrote " << writer.frames_written() << " frames to " << out << "\n"
              << "expected entries=" << e.entries << " exits=" << e.exits << " regret_enter=" << e.regret_enter
              << " regret_exit=" << e.regret_exit << "\n";
    return 0;
}

int run_count(const EngineFlags& ef, const std::string& replay_file) {
    ReplayReader reader(replay_file);
    const FrameDims dims{reader.header().width, reader.header().height};
    CountingEngine engine(ef.build(dims), dims, ef.logs());
    while (auto f = reader.next()) engine.process(*f);
    engine.flush();
    print_counts(engine.state().counts, engine.frames_processed());
    if (engine.degraded()) std::cerr << "warning: log sink failure: " << engine.last_sink_error() << "\n";
    return 0;
}

struct ServeFlags {
    std::string listen = "127.0.0.1:8080";
    std::string source;
    std::string replay_file;
    bool paced = true;
    std::size_t queue_capacity = 4;
    std::uint32_t suite_per_kind = 1;
    std::uint64_t seed = 1;
    bool exit_when_done = false;
    std::string port_file;
};

int run_serve(const ServeFlags& sv, const EngineFlags& ef, const ScenarioFlags& sf) {
    std::string source_kind = sv.source;
    if (source_kind.empty()) source_kind = sv.replay_file.empty() ? "synthetic" : "replay";
    if (source_kind == "synthetic" && !sv.replay_file.empty())
        throw CLI::ValidationError("--replay-file", "contradicts --source synthetic");
    if (source_kind == "replay" && sv.replay_file.empty())
        throw CLI::ValidationError("--source", "replay needs --replay-file");

    std::unique_ptr<FrameSource> source;
    FrameDims dims;
    if (source_kind == "replay") {
        source = std::make_unique<ReplaySource>(sv.replay_file, sv.paced);
        dims = source->dims();
    } else {
        dims = sf.dims();
        const RoiLayout layout = ef.layout(dims);
        source = std::make_unique<SyntheticSource>(plan_suite(sv.suite_per_kind, sf.resolved(), sv.seed, layout, dims),
                                                   layout, dims, sv.paced);
    }

    ServiceConfig cfg;
    cfg.engine = ef.build(dims);
    if (!ef.log_dir.empty()) cfg.log_dir = ef.log_dir;
    cfg.queue_capacity = sv.queue_capacity;

    const auto [host, port] = parse_listen(sv.listen);
    CounterService service(cfg, std::move(source));
    HttpServer http(service);
    const int bound = http.bind(host, port);
    if (bound < 0) {
        std::cerr << "error: cannot listen on " << sv.listen << "\n";
        return 3;
    }
    if (!sv.port_file.empty()) std::ofstream(sv.port_file) << bound << "\n";
    std::cout << "listening on " << host << ":" << bound << " (" << service.status()->source << ")" << std::endl;

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::thread server([&] { http.listen(); });
    while (!g_interrupted) {
        if (sv.exit_when_done && service.status()->finished) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    http.stop();
    server.join();
    const auto st = service.status();
    print_counts(st->counts.counts, st->frames_processed);
    std::cout << "frames_dropped=" << st->frames_dropped << " fps=" << st->fps_estimate << "\n";
    if (!st->source_error.empty()) std::cerr << "source error: " << st->source_error << "\n";
    return 0;
}

int run_report(const std::string& log_dir, std::string event_log, std::optional<std::uint64_t> from,
               std::optional<std::uint64_t> to, std::uint64_t bucket, const std::string& format) {
    if (event_log.empty()) {
        if (log_dir.empty()) throw CLI::ValidationError("report", "needs --log-dir or --event-log");
        event_log = LogPaths::under(log_dir).events.string();
    }
    const auto events = read_event_log(event_log);
    const std::uint64_t last = events.empty() ? 0 : events.back().timestamp_us + 1;
    const Report r = build_report(events, from.value_or(0), to.value_or(std::max(last, from.value_or(0))), bucket);
    if (format == "json")
        std::cout << report_to_json(r) << "\n";
    else
        std::cout << report_to_csv(r);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bidirectional people counter for overhead depth streams"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path;

    auto add_config = [&](CLI::App* sub) {
        sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        sub->add_option("--config", config_path, "key = value file; keys are the long flag names");
    };

    EngineFlags ef;
    ScenarioFlags sf;
    ServeFlags sv;

    auto* serve = app.add_subcommand("serve", "Run the counter with the HTTP API");
    add_config(serve);
    ef.add_to(*serve);
    sf.add_to(*serve, false);
    serve->add_option("--listen", sv.listen, "HOST:PORT (port 0 picks one)")->capture_default_str();
    serve->add_option("--source", sv.source, "synthetic|replay")->check(CLI::IsMember({"synthetic", "replay"}));
    serve->add_option("--replay-file", sv.replay_file, "DRF1 file for the replay source");
    serve->add_flag("--paced,!--unpaced", sv.paced, "Release frames at their recorded rate (default) or as fast as possible");
    serve->add_option("--queue-capacity", sv.queue_capacity, "Frames buffered between source and counter")
        ->capture_default_str();
    serve->add_option("--suite-per-kind", sv.suite_per_kind, "Synthetic source: scenarios per kind")
        ->capture_default_str();
    serve->add_option("--seed", sv.seed, "Synthetic source: suite seed")->capture_default_str();
    serve->add_flag("--exit-when-done", sv.exit_when_done, "Exit once the source is exhausted");
    serve->add_option("--port-file", sv.port_file, "Write the bound port to this file");

    std::string gen_out;
    std::uint32_t gen_suite = 0;
    auto* gen = app.add_subcommand("gen", "Write a synthetic scenario as a DRF1 replay file");
    add_config(gen);
    sf.add_to(*gen, true);
    gen->add_option("--crossing-axis", ef.crossing_axis, "horizontal|vertical")->capture_default_str();
    gen->add_option("--roi1", ef.roi1, "ROI 1 (inside) as x,y,w,h");
    gen->add_option("--roi2", ef.roi2, "ROI 2 (middle) as x,y,w,h");
    gen->add_option("--roi3", ef.roi3, "ROI 3 (outside) as x,y,w,h");
    gen->add_option("--suite-per-kind", gen_suite, "Emit a concatenated suite with N scenarios per kind");
    gen->add_option("--out,-o", gen_out, "Output file")->required();

    std::string count_file;
    auto* count = app.add_subcommand("count", "Count a replay file offline");
    add_config(count);
    ef.add_to(*count);
    count->add_option("replay,--replay-file", count_file, "DRF1 input")->required();

    std::string report_dir, report_log, report_format = "csv";
    std::optional<std::uint64_t> report_from, report_to;
    std::uint64_t report_bucket = 60'000'000;
    auto* report = app.add_subcommand("report", "Bucketed counts from an event log");
    add_config(report);
    report->add_option("--log-dir", report_dir, "Log directory written by serve/count");
    report->add_option("--event-log", report_log, "Event log path (overrides --log-dir)");
    report->add_option("--from", report_from, "Window start (us)");
    report->add_option("--to", report_to, "Window end, exclusive (us); default just past the last event");
    report->add_option("--bucket", report_bucket, "Bucket width (us)")->capture_default_str();
    report->add_option("--format", report_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*serve) return run_serve(sv, ef, sf);
        if (*gen) return run_gen(sf, ef, gen_suite, gen_out);
        if (*count) return run_count(ef, count_file);
        if (*report) return run_report(report_dir, report_log, report_from, report_to, report_bucket, report_format);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
