// Copyright 2026 Softdec Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "softdec/rng.h"

#include <cmath>

namespace softdec {

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t fnv1a(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng::Rng(uint64_t seed, uint64_t stream) : key_(mix64(seed ^ mix64(stream))) {}

uint64_t Rng::stream_id(std::string_view name) { return fnv1a(name); }

uint64_t Rng::stream_id(std::string_view name, uint64_t index) {
  return mix64(fnv1a(name) + index);
}

uint64_t Rng::next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  double u1 = next_double();
  double u2 = next_double();
  // Guard u1 = 0; shifts by half an ulp of the 53-bit lattice.
  double r = std::sqrt(-2.0 * std::log(u1 + 0x1.0p-54));
  double theta = 2.0 * M_PI * u2;
  cached_gaussian_ = r * std::sin(theta);
  has_cached_gaussian_ = true;
  return r * std::cos(theta);
}

uint64_t Rng::next_below(uint64_t n) {
  // Rejection-free multiply-shift is biased for huge n; n here is small
  // (shot counts), so 128-bit multiply bias is negligible but we reject
  // anyway to stay exact.
  uint64_t threshold = (0 - n) % n;
  for (;;) {
    uint64_t r = next_u64();
    unsigned __int128 m = static_cast<unsigned __int128>(r) * n;
    uint64_t lo = static_cast<uint64_t>(m);
    if (lo >= threshold) return static_cast<uint64_t>(m >> 64);
  }
}

}  // namespace softdec
