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

#include "hpgpn/rng.hpp"

#include <cmath>
#include <numbers>

namespace hpgpn
{

namespace
{

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

} // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key)
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t realization, std::uint32_t grid_index)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      ctr_{0u, grid_index, static_cast<std::uint32_t>(realization),
           static_cast<std::uint32_t>(realization >> 32)}
{
}

void StreamRng::refill()
{
    block_ = Philox4x32::generate(ctr_, key_);
    ++ctr_[0];
    pos_ = 0;
}

std::uint32_t StreamRng::next_u32()
{
    if (pos_ == 4)
        refill();
    return block_[pos_++];
}

StreamRng::result_type StreamRng::operator()()
{
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double StreamRng::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double StreamRng::normal()
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 1.0 - uniform(); // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

std::complex<double> StreamRng::complex_normal(double variance)
{
    double s = std::sqrt(0.5 * variance);
    double re = normal();
    double im = normal();
    return {s * re, s * im};
}

double StreamRng::laplace(double stddev)
{
    // Inverse CDF with scale b = stddev / sqrt(2).
    double b = stddev / std::numbers::sqrt2;
    double u = uniform() - 0.5; // [-0.5, 0.5)
    double a = 1.0 - 2.0 * std::abs(u);
    if (a <= 0.0)
        a = std::numeric_limits<double>::min();
    double mag = -b * std::log(a);
    return u < 0.0 ? -mag : mag;
}

std::uint32_t StreamRng::below(std::uint32_t n)
{
    // Lemire's multiply-shift with rejection.
    std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
    auto low = static_cast<std::uint32_t>(m);
    if (low < n)
    {
        std::uint32_t threshold = static_cast<std::uint32_t>(-n) % n;
        while (low < threshold)
        {
            m = static_cast<std::uint64_t>(next_u32()) * n;
            low = static_cast<std::uint32_t>(m);
        }
    }
    return static_cast<std::uint32_t>(m >> 32);
}

StreamRng derive_stream_rng(std::uint64_t master_seed, std::uint64_t realization_index,
                            std::uint32_t grid_index)
{
    return StreamRng(master_seed, realization_index, grid_index);
}

} // namespace hpgpn
