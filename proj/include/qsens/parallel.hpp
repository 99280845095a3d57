#pragma once

#include <functional>

namespace qsens {

// Worker count for embarrassingly parallel loops; the QSENS_THREADS
// environment variable overrides hardware_concurrency.
int worker_count();

// Runs body(0..n-1) across workers. Each index must write only its own slots;
// ordering of side effects between indices is unspecified.
void parallel_for(int n, const std::function<void(int)>& body);

} // namespace qsens
