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

#include "onhkit/parallel.h"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace onhkit {

namespace {
int default_threads = -1;
}

void SetThreadCount(int threads) {
  if (default_threads < 0) default_threads = omp_get_max_threads();
  omp_set_num_threads(threads > 0 ? threads : default_threads);
}

int ThreadCount() { return omp_get_max_threads(); }

void ConfigureThreadsFromEnv() {
  const char* env = std::getenv("ONHKIT_THREADS");
  if (env == nullptr) return;
  try {
    SetThreadCount(std::stoi(env));
  } catch (const std::exception&) {
    // Malformed values leave the runtime default in place.
  }
}

}  // namespace onhkit
