#ifndef QS4_PARALLEL_HPP
#define QS4_PARALLEL_HPP

#include <functional>

namespace qs4 {

// Worker count from QS4_THREADS (default 1).
int thread_count();

// Runs body(i) for i in [0, count) on up to thread_count() threads.
// Callers write to per-index slots and reduce in index order, so results do
// not depend on the thread count.
void parallel_for(int count, const std::function<void(int)>& body);

} // namespace qs4

#endif
