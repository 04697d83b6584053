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

#ifndef HPGPN_CHANNEL_HPP
#define HPGPN_CHANNEL_HPP

#include "hpgpn/common.hpp"
#include "hpgpn/rng.hpp"

#include <cstdint>
#include <vector>

namespace hpgpn
{

/// Saleh-Valenzuela clustered channel parameters. Angular spread is the standard deviation of
/// the Laplacian ray offsets, in degrees.
struct ChannelParams
{
    Index n_tx = 144;
    Index n_rx = 36;
    Index n_clusters = 5;
    Index n_rays = 10;
    double angular_spread_deg = 10.0;
    std::uint64_t seed = 0;

    void validate() const;
    Index n_paths() const { return n_clusters * n_rays; }
};

/// Per-ray angles in radians, cluster-major (ray l of cluster i at index i * n_rays + l).
struct RayAngles
{
    RVec cluster_aoa;
    RVec cluster_aod;
    RVec aoa;
    RVec aod;
};

struct ChannelMatrix
{
    CMat h; // n_rx x n_tx
    RVec aoa;
    RVec aod;
    CVec gains;
};

/// Half-wavelength ULA response: element m is exp(j*pi*m*sin(theta)) / sqrt(n).
template <typename Real = double>
CVectorT<Real> array_response(Real theta, Index n)
{
    if (n < 1)
        throw InvalidParameter("array_response: antenna count must be >= 1");
    const Real phase_step = std::numbers::pi_v<Real> * std::sin(theta);
    const Real scale = Real(1) / std::sqrt(static_cast<Real>(n));
    CVectorT<Real> a(n);
    for (Index m = 0; m < n; ++m)
        a(m) = std::polar(scale, phase_step * static_cast<Real>(m));
    return a;
}

RayAngles sample_angles(const ChannelParams& params, StreamRng& rng);

/// Assembles H = sqrt(Nt Nr / (Nc NR)) * sum_l gains_l * a_r(aoa_l) a_t(aod_l)^H.
ChannelMatrix channel_from_rays(const ChannelParams& params, const RVec& aoa, const RVec& aod,
                                const CVec& gains);

ChannelMatrix generate_channel(const ChannelParams& params, StreamRng& rng);

/// Same as above with the stream derived from params.seed (realization 0, channel stream).
ChannelMatrix generate_channel(const ChannelParams& params);

} // namespace hpgpn

#endif
