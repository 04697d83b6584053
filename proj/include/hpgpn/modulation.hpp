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

#ifndef HPGPN_MODULATION_HPP
#define HPGPN_MODULATION_HPP

#include "hpgpn/common.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hpgpn
{

enum class ModKind
{
    Qam,
    Pqam
};

/// Ring gaps (delta_rho, innermost first) and per-ring distinct angular gaps (delta_theta,
/// ring by ring, ascending within a ring).
struct PolarGeometry
{
    std::vector<double> delta_rho;
    std::vector<double> delta_theta;
};

/// Unit-energy constellation. Symbol index i carries the bit pattern of i, MSB first.
class Constellation
{
  public:
    Constellation(ModKind kind, int order, int gamma, CVec points);

    ModKind kind() const { return kind_; }
    int order() const { return order_; }
    /// Amplitude-ring count for PQAM; 0 for QAM.
    int gamma() const { return gamma_; }
    int bits_per_symbol() const { return bits_; }
    std::string name() const;

    const CVec& symbols() const { return points_; }
    cd symbol(int index) const { return points_(index); }
    const RVec& amplitudes() const { return amplitude_; }
    const RVec& phases() const { return phase_; }
    const std::vector<int>& rings() const { return ring_; }
    const std::vector<int>& phase_indices() const { return phase_index_; }
    const std::vector<double>& ring_radii() const { return ring_radii_; }

    double mean_energy() const { return points_.squaredNorm() / static_cast<double>(order_); }
    PolarGeometry polar_geometry() const;

  private:
    ModKind kind_;
    int order_;
    int gamma_;
    int bits_;
    CVec points_;
    RVec amplitude_;
    RVec phase_;
    std::vector<int> ring_;
    std::vector<int> phase_index_;
    std::vector<double> ring_radii_;
};

/// Square Gray-coded M-QAM with E_s = 1. 4-QAM is PQAM(1) rotated by pi/4.
Constellation build_qam(int m);

/// M-PQAM(gamma): gamma rings with odd-integer radii, M/gamma phases each, spacing 2 pi gamma/M,
/// Gray-coded amplitude bits (high) and phase bits (low).
Constellation build_pqam(int m, int gamma);

/// Parses "16-QAM", "4-QAM", "16-PQAM(8)".
Constellation parse_scheme(const std::string& text);

std::uint32_t gray_encode(std::uint32_t x);
std::uint32_t gray_decode(std::uint32_t g);

/// Groups bits (MSB first) into symbol indices.
std::vector<int> map_bits(const Constellation& c, std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> demap_symbols(const Constellation& c, std::span<const int> indices);
CVec modulate(const Constellation& c, std::span<const int> indices);

} // namespace hpgpn

#endif
