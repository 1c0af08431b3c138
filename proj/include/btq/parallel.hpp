#pragma once

// Static-chunked parallel loop. Each index is handled by exactly one worker,
// so callers that write per-index slots and reduce afterwards in index order
// get results independent of the thread count.

#include <functional>

namespace btq {

// 0 restores the default (hardware concurrency)
void set_threads(int n);
int threads();

void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace btq
