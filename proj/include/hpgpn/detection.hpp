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

#ifndef HPGPN_DETECTION_HPP
#define HPGPN_DETECTION_HPP

#include "hpgpn/common.hpp"
#include "hpgpn/modulation.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace hpgpn
{

enum class DetectorKind
{
    Euclidean,
    Polar
};

std::string to_string(DetectorKind kind);
DetectorKind parse_detector(const std::string& name);

struct DetectorConfig
{
    DetectorKind kind = DetectorKind::Euclidean;
    double gamma2 = 0.0;   // sigma2_psi + sigma2_n (E_s = 1)
    double sigma2_n = 0.0; // 1 / (2 beta_k)

    static DetectorConfig euclidean() { return {}; }
    static DetectorConfig polar(double sigma2_psi, double beta_k);
};

/// r / (rho V_kk).
cd normalize_stream(cd r, double rho, double v_kk);

/// Nearest point; ties go to the lowest index.
int euclidean_detect(cd r, const Constellation& c);

/// argmin over s of (|r| - s_rho)^2 / sigma2_n + wrap(arg r - s_theta)^2 / gamma2.
int polar_detect(cd r, const Constellation& c, const DetectorConfig& cfg);

int detect(cd r, const Constellation& c, const DetectorConfig& cfg);

struct ErrorCounts
{
    std::uint64_t bit_errors = 0;
    std::uint64_t symbol_errors = 0;
};

/// Bit errors and symbol errors (a symbol is any group of bits_per_symbol bits with an error).
ErrorCounts count_errors(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits,
                         int bits_per_symbol);

} // namespace hpgpn

#endif
