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

#include <doctest.h>

#include "hpgpn/channel.hpp"
#include "hpgpn/rng.hpp"

#include <cmath>

using namespace hpgpn;

TEST_CASE("array response entries")
{
    const double theta = 0.37;
    const CVec a = array_response(theta, 8);
    for (Index m = 0; m < 8; ++m)
    {
        const cd expect = std::exp(cd(0.0, kPi * m * std::sin(theta))) / std::sqrt(8.0);
        CHECK(std::abs(a(m) - expect) < 1e-15);
    }
    for (Index n : {1, 3, 64, 144})
        for (double t : {-3.0, -0.5, 0.0, 1.0, 2.5})
            CHECK(std::abs(array_response(t, n).norm() - 1.0) < 1e-12);
    CHECK(array_response(0.0, 5).isApprox(CVec::Constant(5, 1.0 / std::sqrt(5.0))));
    CHECK_THROWS_AS(array_response(0.0, 0), InvalidParameter);
    CHECK(array_response<float>(0.3f, 4).norm() == doctest::Approx(1.0f));
}

TEST_CASE("single-ray channel is a scaled outer product")
{
    ChannelParams p;
    p.n_tx = 16;
    p.n_rx = 4;
    p.n_clusters = 1;
    p.n_rays = 1;
    RVec aoa(1), aod(1);
    aoa << 0.4;
    aod << -1.1;
    CVec g(1);
    g << cd(0.3, -0.8);
    const ChannelMatrix ch = channel_from_rays(p, aoa, aod, g);
    CMat expect(4, 16);
    for (Index r = 0; r < 4; ++r)
        for (Index t = 0; t < 16; ++t)
            expect(r, t) = g(0) * std::exp(cd(0.0, kPi * (r * std::sin(0.4) - t * std::sin(-1.1))));
    // sqrt(Nt Nr) times the 1/sqrt(n) normalisations of both responses leaves the raw exponentials.
    CHECK((ch.h - expect).norm() < 1e-12);
}

TEST_CASE("channel power and angle statistics")
{
    ChannelParams p;
    const int n = 3000;
    double power = 0.0, gain2 = 0.0, offset2 = 0.0, mean_cluster = 0.0;
    long offsets = 0;
    for (int i = 0; i < n; ++i)
    {
        StreamRng rng = derive_stream_rng(77, static_cast<std::uint64_t>(i), kChannelStream);
        StreamRng rng2 = rng;
        const ChannelMatrix ch = generate_channel(p, rng);
        power += ch.h.squaredNorm();
        gain2 += ch.gains.squaredNorm() / static_cast<double>(ch.gains.size());
        const RayAngles ang = sample_angles(p, rng2);
        for (Index c = 0; c < p.n_clusters; ++c)
        {
            mean_cluster += ang.cluster_aod(c);
            for (Index l = 0; l < p.n_rays; ++l)
            {
                const double d = wrap_phase(ang.aod(c * p.n_rays + l) - ang.cluster_aod(c));
                offset2 += d * d;
                ++offsets;
            }
        }
    }
    CHECK(power / n / (144.0 * 36.0) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(gain2 / n == doctest::Approx(1.0).epsilon(0.01));
    const double spread = 10.0 * kPi / 180.0;
    CHECK(std::sqrt(offset2 / offsets) == doctest::Approx(spread).epsilon(0.02));
    CHECK(mean_cluster / (n * p.n_clusters) == doctest::Approx(kPi).epsilon(0.02));
}

TEST_CASE("seeded generation is reproducible")
{
    ChannelParams p;
    p.n_tx = 32;
    p.n_rx = 8;
    p.seed = 11;
    const CMat a = generate_channel(p).h;
    const CMat b = generate_channel(p).h;
    CHECK(a == b);
    p.seed = 12;
    CHECK(generate_channel(p).h != a);
}

TEST_CASE("invalid parameters")
{
    ChannelParams p;
    p.n_clusters = 0;
    CHECK_THROWS_AS(p.validate(), InvalidParameter);
    p = ChannelParams{};
    p.angular_spread_deg = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidParameter);
}
