// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <future>

namespace palibench {

// Runs fn over [0, count) with at most max_in_flight tasks live at once and
// hands each result to commit in index order, whatever order tasks finish.
// Exceptions from fn re-throw at the failing index after earlier commits.
template <typename Fn, typename Commit>
void bounded_ordered_for(std::size_t count, int max_in_flight, Fn&& fn, Commit&& commit) {
    if (max_in_flight < 1) max_in_flight = 1;
    if (max_in_flight == 1) {
        for (std::size_t i = 0; i < count; ++i) commit(i, fn(i));
        return;
    }
    using Result = decltype(fn(std::size_t{0}));
    std::deque<std::future<Result>> window;
    std::size_t next_launch = 0, next_commit = 0;
    while (next_commit < count) {
        while (next_launch < count && window.size() < static_cast<std::size_t>(max_in_flight)) {
            window.push_back(
                std::async(std::launch::async, [&fn, i = next_launch] { return fn(i); }));
            ++next_launch;
        }
        commit(next_commit, window.front().get());
        window.pop_front();
        ++next_commit;
    }
}

} // namespace palibench
