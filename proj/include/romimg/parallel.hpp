// Copyright The romimg Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROMIMG_PARALLEL_HPP
#define ROMIMG_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace romimg
{

// Worker count: ROMIMG_THREADS if set and positive, else the hardware concurrency.
int thread_count();

// Calls fn(i) for i in [0, count) on up to thread_count() threads. Exceptions thrown
// by fn are rethrown (the first one) after all workers have joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)> &fn);

} // namespace romimg

#endif // ROMIMG_PARALLEL_HPP
