#pragma once

#include <cstddef>
#include <functional>

namespace sphaerica {

/// Worker count: SPHAERICA_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Calls body(i) for i in [0, n) over contiguous index blocks. Each index is
/// handled exactly once, so results written per index are thread-count independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sphaerica
