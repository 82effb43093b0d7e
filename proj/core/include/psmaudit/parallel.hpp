#pragma once

#include <cstddef>
#include <functional>

namespace psmaudit {

// Runs body(i) for i in [0, n) on up to `threads` worker threads. Each index
// is visited exactly once; callers write results into per-index slots so the
// outcome does not depend on scheduling.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

// --threads value, else PSM_AUDIT_THREADS, else 1.
unsigned resolve_threads(unsigned requested);

}  // namespace psmaudit
