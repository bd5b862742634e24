/*
 * Copyright 2026 The PIA Lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pia/rng.h"

#include <cmath>
#include <numbers>

#include "pia/error.h"

namespace pia {

int ExitCodeFor(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kUsage:
      return 1;
    case ErrorCategory::kData:
      return 2;
    case ErrorCategory::kNumeric:
      return 3;
  }
  return 1;
}

std::uint64_t Rng::Below(std::uint64_t bound) {
  if (bound == 0) throw UsageError("Rng::Below: bound must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::Normal() {
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t master,
                         std::initializer_list<std::uint64_t> components) {
  std::uint64_t h = SplitMix64(master);
  for (std::uint64_t c : components) h = SplitMix64(h ^ SplitMix64(c));
  return h;
}

}  // namespace pia
