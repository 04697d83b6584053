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

#include "hpgpn/detection.hpp"

#include <limits>

namespace hpgpn
{

std::string to_string(DetectorKind kind)
{
    return kind == DetectorKind::Polar ? "PM" : "EUC";
}

DetectorKind parse_detector(const std::string& name)
{
    if (name == "EUC" || name == "EUC-D" || name == "euclidean")
        return DetectorKind::Euclidean;
    if (name == "PM" || name == "PM-D" || name == "polar")
        return DetectorKind::Polar;
    throw InvalidParameter("unknown detector '" + name + "'");
}

DetectorConfig DetectorConfig::polar(double sigma2_psi, double beta_k)
{
    if (!(beta_k > 0.0))
        throw InvalidParameter("DetectorConfig::polar: per-stream SNR must be positive");
    double s2n = 1.0 / (2.0 * beta_k);
    return {DetectorKind::Polar, sigma2_psi + s2n, s2n};
}

cd normalize_stream(cd r, double rho, double v_kk)
{
    double g = rho * v_kk;
    if (!(g > 0.0))
        throw DegenerateError("normalize_stream: stream gain is zero");
    return r / g;
}

int euclidean_detect(cd r, const Constellation& c)
{
    const CVec& pts = c.symbols();
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < c.order(); ++i)
    {
        double d = std::norm(r - pts(i));
        if (d < best_d)
        {
            best_d = d;
            best = i;
        }
    }
    return best;
}

int polar_detect(cd r, const Constellation& c, const DetectorConfig& cfg)
{
    if (!(cfg.sigma2_n > 0.0) || !(cfg.gamma2 > 0.0))
        throw InvalidParameter("polar_detect: variances must be positive");
    const double w_rho = 1.0 / cfg.sigma2_n;
    const double w_theta = 1.0 / cfg.gamma2;
    const double r_rho = std::abs(r);
    const double r_theta = std::arg(r);
    const RVec& amp = c.amplitudes();
    const RVec& ph = c.phases();
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < c.order(); ++i)
    {
        double dr = r_rho - amp(i);
        double dt = wrap_phase(r_theta - ph(i));
        double d = w_rho * dr * dr + w_theta * dt * dt;
        if (d < best_d)
        {
            best_d = d;
            best = i;
        }
    }
    return best;
}

int detect(cd r, const Constellation& c, const DetectorConfig& cfg)
{
    return cfg.kind == DetectorKind::Polar ? polar_detect(r, c, cfg) : euclidean_detect(r, c);
}

ErrorCounts count_errors(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits,
                         int bits_per_symbol)
{
    if (tx_bits.size() != rx_bits.size())
        throw InvalidParameter("count_errors: bit streams differ in length");
    if (bits_per_symbol < 1 || tx_bits.size() % static_cast<std::size_t>(bits_per_symbol) != 0)
        throw InvalidParameter("count_errors: length is not a whole number of symbols");
    ErrorCounts out;
    const auto b = static_cast<std::size_t>(bits_per_symbol);
    for (std::size_t s = 0; s < tx_bits.size(); s += b)
    {
        std::uint64_t errs = 0;
        for (std::size_t j = 0; j < b; ++j)
            errs += (tx_bits[s + j] & 1) != (rx_bits[s + j] & 1);
        out.bit_errors += errs;
        out.symbol_errors += errs > 0;
    }
    return out;
}

} // namespace hpgpn
