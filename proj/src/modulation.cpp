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

#include "hpgpn/modulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <regex>

namespace hpgpn
{

namespace
{

constexpr double kRadiusTol = 1e-9;

bool is_pow2(int x) { return x > 0 && std::has_single_bit(static_cast<unsigned>(x)); }

int log2i(int x) { return std::bit_width(static_cast<unsigned>(x)) - 1; }

double angle_0_2pi(cd z)
{
    double a = std::arg(z);
    return a < 0.0 ? a + 2.0 * kPi : a;
}

} // namespace

std::uint32_t gray_encode(std::uint32_t x) { return x ^ (x >> 1); }

std::uint32_t gray_decode(std::uint32_t g)
{
    std::uint32_t x = g;
    for (std::uint32_t s = g >> 1; s != 0; s >>= 1)
        x ^= s;
    return x;
}

Constellation::Constellation(ModKind kind, int order, int gamma, CVec points)
    : kind_(kind), order_(order), gamma_(gamma), bits_(log2i(order)), points_(std::move(points))
{
    if (!is_pow2(order_) || order_ < 2 || points_.size() != order_)
        throw InvalidParameter("Constellation: order must be a power of two matching the point count");

    amplitude_ = points_.cwiseAbs();
    phase_.resize(order_);
    for (int i = 0; i < order_; ++i)
        phase_(i) = std::arg(points_(i));

    for (int i = 0; i < order_; ++i)
    {
        double r = amplitude_(i);
        auto it = std::find_if(ring_radii_.begin(), ring_radii_.end(),
                               [r](double x) { return std::abs(x - r) < kRadiusTol; });
        if (it == ring_radii_.end())
            ring_radii_.push_back(r);
    }
    std::sort(ring_radii_.begin(), ring_radii_.end());

    ring_.assign(order_, 0);
    phase_index_.assign(order_, 0);
    for (std::size_t k = 0; k < ring_radii_.size(); ++k)
    {
        std::vector<int> members;
        for (int i = 0; i < order_; ++i)
            if (std::abs(amplitude_(i) - ring_radii_[k]) < kRadiusTol)
                members.push_back(i);
        std::sort(members.begin(), members.end(), [this](int a, int b) {
            return angle_0_2pi(points_(a)) < angle_0_2pi(points_(b));
        });
        for (std::size_t j = 0; j < members.size(); ++j)
        {
            ring_[members[j]] = static_cast<int>(k);
            phase_index_[members[j]] = static_cast<int>(j);
        }
    }
}

std::string Constellation::name() const
{
    if (kind_ == ModKind::Qam)
        return std::to_string(order_) + "-QAM";
    return std::to_string(order_) + "-PQAM(" + std::to_string(gamma_) + ")";
}

PolarGeometry Constellation::polar_geometry() const
{
    PolarGeometry g;
    for (std::size_t k = 1; k < ring_radii_.size(); ++k)
        g.delta_rho.push_back(ring_radii_[k] - ring_radii_[k - 1]);

    for (std::size_t k = 0; k < ring_radii_.size(); ++k)
    {
        std::vector<double> angles;
        for (int i = 0; i < order_; ++i)
            if (ring_[i] == static_cast<int>(k))
                angles.push_back(angle_0_2pi(points_(i)));
        std::sort(angles.begin(), angles.end());
        std::vector<double> gaps;
        for (std::size_t j = 0; j < angles.size(); ++j)
        {
            double next = j + 1 < angles.size() ? angles[j + 1] : angles[0] + 2.0 * kPi;
            gaps.push_back(next - angles[j]);
        }
        std::sort(gaps.begin(), gaps.end());
        std::vector<double> distinct;
        for (double x : gaps)
            if (distinct.empty() || x - distinct.back() > kRadiusTol)
                distinct.push_back(x);
        g.delta_theta.insert(g.delta_theta.end(), distinct.begin(), distinct.end());
    }
    return g;
}

Constellation build_pqam(int m, int gamma)
{
    if (!is_pow2(m) || m < 2 || !is_pow2(gamma) || gamma > m || m % gamma != 0)
        throw InvalidParameter("build_pqam: need M, gamma powers of two with gamma | M");
    const int n_phase = m / gamma;
    const int phase_bits = log2i(n_phase);
    // Odd-integer radii 1, 3, ..., 2 gamma - 1; mean square (4 gamma^2 - 1) / 3.
    const double scale = 1.0 / std::sqrt((4.0 * gamma * gamma - 1.0) / 3.0);
    CVec pts(m);
    for (int ring = 0; ring < gamma; ++ring)
    {
        for (int p = 0; p < n_phase; ++p)
        {
            auto label = (gray_encode(static_cast<std::uint32_t>(ring)) << phase_bits) |
                         gray_encode(static_cast<std::uint32_t>(p));
            double radius = (2.0 * ring + 1.0) * scale;
            double angle = 2.0 * kPi * p / n_phase;
            pts(static_cast<Index>(label)) = std::polar(radius, angle);
        }
    }
    return Constellation(ModKind::Pqam, m, gamma, std::move(pts));
}

Constellation build_qam(int m)
{
    if (m == 4)
    {
        Constellation psk = build_pqam(4, 1);
        return Constellation(ModKind::Qam, 4, 0, psk.symbols() * std::polar(1.0, kPi / 4.0));
    }
    if (m < 16 || !is_pow2(m) || log2i(m) % 2 != 0)
        throw InvalidParameter("build_qam: unsupported order " + std::to_string(m) +
                               " (square QAM only)");
    const int side = 1 << (log2i(m) / 2);
    const int axis_bits = log2i(side);
    // Levels +-1, +-3, ... scaled so E_s = 1: mean square per axis is (side^2 - 1) / 3.
    const double scale = 1.0 / std::sqrt(2.0 * (side * side - 1.0) / 3.0);
    CVec pts(m);
    for (std::uint32_t gi = 0; gi < static_cast<std::uint32_t>(side); ++gi)
    {
        for (std::uint32_t gq = 0; gq < static_cast<std::uint32_t>(side); ++gq)
        {
            double li = 2.0 * gray_decode(gi) - (side - 1);
            double lq = 2.0 * gray_decode(gq) - (side - 1);
            pts(static_cast<Index>((gi << axis_bits) | gq)) = cd(li, lq) * scale;
        }
    }
    return Constellation(ModKind::Qam, m, 0, std::move(pts));
}

Constellation parse_scheme(const std::string& text)
{
    static const std::regex qam(R"(^\s*(\d+)-QAM\s*$)", std::regex::icase);
    static const std::regex pqam(R"(^\s*(\d+)-PQAM\((\d+)\)\s*$)", std::regex::icase);
    std::smatch mt;
    if (std::regex_match(text, mt, qam))
        return build_qam(std::stoi(mt[1]));
    if (std::regex_match(text, mt, pqam))
        return build_pqam(std::stoi(mt[1]), std::stoi(mt[2]));
    throw InvalidParameter("unsupported modulation scheme '" + text + "'");
}

std::vector<int> map_bits(const Constellation& c, std::span<const std::uint8_t> bits)
{
    const auto b = static_cast<std::size_t>(c.bits_per_symbol());
    if (bits.size() % b != 0)
        throw InvalidParameter("map_bits: bit count is not a multiple of bits per symbol");
    std::vector<int> out(bits.size() / b);
    for (std::size_t s = 0; s < out.size(); ++s)
    {
        int idx = 0;
        for (std::size_t j = 0; j < b; ++j)
            idx = (idx << 1) | (bits[s * b + j] & 1);
        out[s] = idx;
    }
    return out;
}

std::vector<std::uint8_t> demap_symbols(const Constellation& c, std::span<const int> indices)
{
    const int b = c.bits_per_symbol();
    std::vector<std::uint8_t> out;
    out.reserve(indices.size() * static_cast<std::size_t>(b));
    for (int idx : indices)
    {
        if (idx < 0 || idx >= c.order())
            throw InvalidParameter("demap_symbols: symbol index out of range");
        for (int j = b - 1; j >= 0; --j)
            out.push_back(static_cast<std::uint8_t>((idx >> j) & 1));
    }
    return out;
}

CVec modulate(const Constellation& c, std::span<const int> indices)
{
    CVec out(static_cast<Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i)
        out(static_cast<Index>(i)) = c.symbol(indices[i]);
    return out;
}

} // namespace hpgpn
