/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstddef>
#include <functional>

namespace cbrkit {

/// Worker count used by parallel_for. Zero selects hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Work items must write only to their own
/// output slots. Calls made from inside a worker run inline, so nesting does
/// not oversubscribe. If several items throw, the exception of the lowest
/// index is rethrown, which keeps failures independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cbrkit
