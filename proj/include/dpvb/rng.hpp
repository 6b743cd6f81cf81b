//
// Copyright 2026 The dpvb Authors
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
//

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dpvb {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Mixes a parent stream id with a child key into a new stream id.
inline std::uint64_t mix_stream_key(std::uint64_t parent, std::uint64_t child) {
  std::uint64_t s = parent ^ (child + 0x9E3779B97F4A7C15ull + (parent << 6) + (parent >> 2));
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

}  // namespace detail

/// Counter-derived random stream. A stream is identified by (seed, stream_id);
/// the same pair always reproduces the same sequence, and sub-streams derived
/// from distinct keys never share state. The generator state is seeded through
/// std::seed_seq, whose output is fully specified by the standard, so the
/// sequence does not depend on the standard library in use.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    std::uint64_t s = seed;
    (void)detail::splitmix64(s);
    s ^= detail::mix_stream_key(stream_id, 0x5bf03635ull);
    std::uint32_t words[8];
    for (auto& w : words) w = static_cast<std::uint32_t>(detail::splitmix64(s) >> 16);
    std::seed_seq seq(words, words + 8);
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw strictly inside (0, 1); never returns an endpoint, so it is
  /// always safe to take logs.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Child stream with an independent state, derived from this stream's
  /// identity and `child_key`. Does not consume from this stream.
  RngStream substream(std::uint64_t child_key) const {
    return RngStream(seed_, detail::mix_stream_key(stream_id_, child_key));
  }

  /// Folds a key path into a single derived stream, e.g.
  /// `master.substream({kNoise, n, outer, inner})`.
  RngStream substream(std::initializer_list<std::uint64_t> path) const {
    std::uint64_t id = stream_id_;
    for (std::uint64_t k : path) id = detail::mix_stream_key(id, k);
    return RngStream(seed_, id);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace dpvb
