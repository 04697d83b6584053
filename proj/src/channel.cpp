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

#include "hpgpn/channel.hpp"

#include <cmath>

namespace hpgpn
{

void ChannelParams::validate() const
{
    if (n_tx < 1 || n_rx < 1)
        throw InvalidParameter("channel: antenna counts must be >= 1");
    if (n_clusters < 1 || n_rays < 1)
        throw InvalidParameter("channel: cluster and ray counts must be >= 1");
    if (!(angular_spread_deg > 0.0) || !std::isfinite(angular_spread_deg))
        throw InvalidParameter("channel: angular spread must be positive");
}

RayAngles sample_angles(const ChannelParams& params, StreamRng& rng)
{
    params.validate();
    const double spread = params.angular_spread_deg * kPi / 180.0;
    RayAngles out;
    out.cluster_aoa.resize(params.n_clusters);
    out.cluster_aod.resize(params.n_clusters);
    out.aoa.resize(params.n_paths());
    out.aod.resize(params.n_paths());
    for (Index i = 0; i < params.n_clusters; ++i)
    {
        out.cluster_aoa(i) = 2.0 * kPi * rng.uniform();
        out.cluster_aod(i) = 2.0 * kPi * rng.uniform();
        for (Index l = 0; l < params.n_rays; ++l)
        {
            const Index p = i * params.n_rays + l;
            out.aoa(p) = out.cluster_aoa(i) + rng.laplace(spread);
            out.aod(p) = out.cluster_aod(i) + rng.laplace(spread);
        }
    }
    return out;
}

ChannelMatrix channel_from_rays(const ChannelParams& params, const RVec& aoa, const RVec& aod,
                                const CVec& gains)
{
    params.validate();
    const Index n_paths = gains.size();
    if (aoa.size() != n_paths || aod.size() != n_paths || n_paths != params.n_paths())
        throw InvalidParameter("channel_from_rays: ray count does not match params");

    // Stack responses so H = A_r * diag(g) * A_t^H is one product.
    CMat a_r(params.n_rx, n_paths);
    CMat a_t(params.n_tx, n_paths);
    for (Index p = 0; p < n_paths; ++p)
    {
        a_r.col(p) = array_response(aoa(p), params.n_rx);
        a_t.col(p) = array_response(aod(p), params.n_tx);
    }
    const double scale = std::sqrt(static_cast<double>(params.n_tx * params.n_rx) /
                                   static_cast<double>(params.n_paths()));
    ChannelMatrix ch;
    ch.h = scale * (a_r * gains.asDiagonal() * a_t.adjoint());
    ch.aoa = aoa;
    ch.aod = aod;
    ch.gains = gains;
    return ch;
}

ChannelMatrix generate_channel(const ChannelParams& params, StreamRng& rng)
{
    RayAngles angles = sample_angles(params, rng);
    CVec gains(params.n_paths());
    for (Index p = 0; p < gains.size(); ++p)
        gains(p) = rng.complex_normal(1.0);
    return channel_from_rays(params, angles.aoa, angles.aod, gains);
}

ChannelMatrix generate_channel(const ChannelParams& params)
{
    StreamRng rng = derive_stream_rng(params.seed, 0, kChannelStream);
    return generate_channel(params, rng);
}

} // namespace hpgpn
