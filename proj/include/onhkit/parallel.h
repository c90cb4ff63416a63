/*
 * Copyright 2026 The onhkit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ONHKIT_PARALLEL_H_
#define ONHKIT_PARALLEL_H_

#include <cstddef>

namespace onhkit {

// Worker count used by the OpenMP kernels. 0 restores the runtime default.
void SetThreadCount(int threads);
int ThreadCount();

// Reads ONHKIT_THREADS (0 or unset = auto) and applies it.
void ConfigureThreadsFromEnv();

// Parallel reductions are split into chunks of this many items regardless of
// the thread count, and the chunk partials are summed in index order. This
// keeps floating point results identical for any number of workers.
inline constexpr std::size_t kReductionChunk = 8;

}  // namespace onhkit

#endif  // ONHKIT_PARALLEL_H_
