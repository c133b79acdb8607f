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

#ifndef SOFTDEC_RNG_H
#define SOFTDEC_RNG_H

#include <cstdint>
#include <string_view>

namespace softdec {

/// Counter-based 64-bit generator. A stream is fully determined by
/// (seed, stream id), so independent substreams can be split off by name or
/// shot index and consumed in parallel without coordination. Output does not
/// depend on platform or thread scheduling.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream);

  /// Substream id derived from a human-readable name, e.g. "shots".
  static uint64_t stream_id(std::string_view name);
  /// Substream id for a named, indexed stream, e.g. per-shot streams.
  static uint64_t stream_id(std::string_view name, uint64_t index);

  uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double next_double();
  /// Standard normal via Box-Muller.
  double next_gaussian();
  bool next_bool() { return next_u64() >> 63; }
  bool bernoulli(double p) { return next_double() < p; }
  /// Uniform integer in [0, n).
  uint64_t next_below(uint64_t n);

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

/// SplitMix64 finalizer, exposed for hashing small things deterministically.
uint64_t mix64(uint64_t x);

/// FNV-1a over bytes; used for stable stream names and config hashes.
uint64_t fnv1a(std::string_view bytes);

}  // namespace softdec

#endif
