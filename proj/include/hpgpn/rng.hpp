// SPDX-License-Identifier: Apache-2.0
//
// hpgpn: link-level simulator for hybrid-precoding MIMO under Gaussian phase noise
// Copyright (C) 2026 The hpgpn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef HPGPN_RNG_HPP
#define HPGPN_RNG_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <limits>

namespace hpgpn
{

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
///
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits. No state:
/// the same (counter, key) always yields the same block.
struct Philox4x32
{
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key);
};

/// Reserved grid indices for streams that do not belong to a sweep grid point.
/// Grid points use indices counting up from zero; reserved ones count down from the top.
inline constexpr std::uint32_t kChannelStream = 0xFFFFFFFFu;
inline constexpr std::uint32_t kMaxChannelAttempts = 64;
inline constexpr std::uint32_t kScatterStream = kChannelStream - kMaxChannelAttempts;

/// A single random stream addressed by (seed, realization, grid index).
///
/// Counter layout of each Philox block:
///   word 0      block index within the stream
///   word 1      grid index
///   words 2..3  realization index (low, high)
/// and the key is the 64-bit seed. Distinct (realization, grid) pairs therefore never share
/// a counter value, so substreams are collision-free by construction. This layout is part of
/// the reproducibility contract and must not change.
///
/// All variate transforms are implemented here (not via <random> distributions) so results
/// are bit-identical across standard libraries.
class StreamRng
{
  public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t realization, std::uint32_t grid_index);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();
    std::uint32_t next_u32();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal();
    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance = 1.0);
    /// Zero-mean Laplacian with the given standard deviation.
    double laplace(double stddev);
    /// Uniform integer in [0, n).
    std::uint32_t below(std::uint32_t n);

  private:
    void refill();

    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    Philox4x32::Counter block_{};
    int pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Substream for one (realization, grid point) of an experiment seeded with master_seed.
StreamRng derive_stream_rng(std::uint64_t master_seed, std::uint64_t realization_index,
                            std::uint32_t grid_index);

} // namespace hpgpn

#endif
