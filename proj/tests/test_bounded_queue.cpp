#include <gtest/gtest.h>

#include <thread>

#include "doorcount/bounded_queue.hpp"

using doorcount::BoundedQueue;
using namespace std::chrono_literals;

TEST(BoundedQueueTest, DropOldestKeepsNewest) {
    BoundedQueue<int> q(3);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(q.push_drop_oldest(i), 0u);
    EXPECT_EQ(q.push_drop_oldest(3), 1u);
    EXPECT_EQ(q.push_drop_oldest(4), 1u);
    EXPECT_EQ(q.dropped_total(), 2u);
    EXPECT_EQ(q.size(), 3u);
    EXPECT_EQ(q.pop_for(0ms), 2);
    EXPECT_EQ(q.pop_for(0ms), 3);
    EXPECT_EQ(q.pop_for(0ms), 4);
    EXPECT_FALSE(q.pop_for(1ms));
}

TEST(BoundedQueueTest, ZeroCapacityBecomesOne) {
    BoundedQueue<int> q(0);
    EXPECT_EQ(q.capacity(), 1u);
}

TEST(BoundedQueueTest, CloseDrainsThenStops) {
    BoundedQueue<int> q(2);
    q.push_drop_oldest(1);
    q.close();
    EXPECT_TRUE(q.closed());
    EXPECT_FALSE(q.drained());
    EXPECT_EQ(q.push_drop_oldest(2), 0u);  // discarded
    EXPECT_FALSE(q.push_wait(3));
    EXPECT_EQ(q.pop_for(0ms), 1);
    EXPECT_TRUE(q.drained());
    EXPECT_FALSE(q.pop_for(0ms));
}

TEST(BoundedQueueTest, PushWaitAppliesBackpressure) {
    BoundedQueue<int> q(1);
    ASSERT_TRUE(q.push_wait(1));
    std::atomic<bool> pushed{false};
    std::thread t([&] {
        q.push_wait(2);
        pushed = true;
    });
    std::this_thread::sleep_for(30ms);
    EXPECT_FALSE(pushed.load());
    EXPECT_EQ(q.pop_for(100ms), 1);
    t.join();
    EXPECT_TRUE(pushed.load());
    EXPECT_EQ(q.pop_for(100ms), 2);
    EXPECT_EQ(q.dropped_total(), 0u);
}

TEST(BoundedQueueTest, CloseWakesBlockedProducer) {
    BoundedQueue<int> q(1);
    q.push_wait(1);
    bool result = true;
    std::thread t([&] { result = q.push_wait(2); });
    std::this_thread::sleep_for(10ms);
    q.close();
    t.join();
    EXPECT_FALSE(result);
}

TEST(BoundedQueueTest, ConservationUnderConcurrentDrops) {
    BoundedQueue<int> q(4);
    constexpr int kItems = 20000;
    std::uint64_t popped = 0;
    std::thread consumer([&] {
        int last = -1;
        while (true) {
            auto v = q.pop_for(5ms);
            if (!v) {
                if (q.drained()) break;
                continue;
            }
            EXPECT_GT(*v, last);  // order preserved
            last = *v;
            ++popped;
        }
    });
    for (int i = 0; i < kItems; ++i) q.push_drop_oldest(i);
    q.close();
    consumer.join();
    EXPECT_EQ(popped + q.dropped_total(), static_cast<std::uint64_t>(kItems));
}
