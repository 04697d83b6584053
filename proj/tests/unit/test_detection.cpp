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

#include "hpgpn/detection.hpp"
#include "hpgpn/modulation.hpp"
#include "hpgpn/rng.hpp"

#include <cmath>

using namespace hpgpn;

TEST_CASE("euclidean detection is brute-force nearest")
{
    const Constellation c = build_qam(16);
    StreamRng rng(4, 0, 0);
    for (int t = 0; t < 5000; ++t)
    {
        const cd r = rng.complex_normal(1.5);
        int best = 0;
        for (int i = 1; i < 16; ++i)
            if (std::norm(r - c.symbol(i)) < std::norm(r - c.symbol(best)))
                best = i;
        REQUIRE(euclidean_detect(r, c) == best);
    }
    // Origin is equidistant from the four inner points.
    const int at0 = euclidean_detect(cd(0, 0), c);
    for (int i = 0; i < at0; ++i)
        CHECK(std::abs(c.symbol(i)) > std::abs(c.symbol(at0)) + 1e-9);
}

TEST_CASE("both detectors return transmitted points without noise")
{
    for (const char* name : {"4-QAM", "16-QAM", "16-PQAM(4)", "16-PQAM(8)"})
    {
        const Constellation c = parse_scheme(name);
        const DetectorConfig pm = DetectorConfig::polar(0.01, 100.0);
        for (int i = 0; i < c.order(); ++i)
        {
            CHECK(euclidean_detect(c.symbol(i), c) == i);
            CHECK(polar_detect(c.symbol(i), c, pm) == i);
            CHECK(detect(c.symbol(i) * std::polar(1.0, 0.05), c, pm) == i);
        }
    }
}

TEST_CASE("polar metric parameters")
{
    const DetectorConfig d = DetectorConfig::polar(0.1, 50.0);
    CHECK(d.kind == DetectorKind::Polar);
    CHECK(d.sigma2_n == doctest::Approx(1.0 / 100.0));
    CHECK(d.gamma2 == doctest::Approx(0.1 + 0.01));
    CHECK(parse_detector("PM") == DetectorKind::Polar);
    CHECK(parse_detector("EUC") == DetectorKind::Euclidean);
    CHECK(to_string(DetectorKind::Polar) == "PM");
    CHECK_THROWS(parse_detector("ML"));
}

TEST_CASE("polar metric prefers amplitude under pure rotation")
{
    // The outer corner (3,3) rotated by 0.35 rad lies nearer the middle-ring point (1,3) in
    // the plane, but its amplitude is intact; with strong phase noise the polar rule keeps it.
    const Constellation c = build_qam(16);
    const double a = 1.0 / std::sqrt(10.0);
    int k = -1, k_mid = -1;
    for (int i = 0; i < 16; ++i)
    {
        if (std::abs(c.symbol(i) - cd(3 * a, 3 * a)) < 1e-12)
            k = i;
        if (std::abs(c.symbol(i) - cd(a, 3 * a)) < 1e-12)
            k_mid = i;
    }
    REQUIRE(k >= 0);
    const cd r = c.symbol(k) * std::polar(1.0, 0.35);
    CHECK(polar_detect(r, c, DetectorConfig::polar(0.1, 1e4)) == k);
    CHECK(euclidean_detect(r, c) == k_mid);
}

TEST_CASE("with phase noise off the two rules mostly agree")
{
    const Constellation c = build_qam(16);
    StreamRng rng(12, 0, 0);
    const double beta = db_to_linear(20.0);
    const DetectorConfig pm = DetectorConfig::polar(0.0, beta);
    int agree = 0;
    const int n = 10000;
    for (int t = 0; t < n; ++t)
    {
        const int i = static_cast<int>(rng.below(16));
        const cd r = c.symbol(i) + rng.complex_normal(1.0 / beta);
        agree += euclidean_detect(r, c) == polar_detect(r, c, pm);
    }
    MESSAGE("agreement rate " << static_cast<double>(agree) / n);
    CHECK(agree > 0.97 * n);
}

TEST_CASE("stream normalisation and error counting")
{
    CHECK(normalize_stream(cd(2, 4), 2.0, 0.5) == cd(2, 4));
    CHECK(normalize_stream(cd(3, 0), 1.5, 2.0) == cd(1, 0));
    const std::vector<std::uint8_t> tx{0, 0, 1, 1, 1, 0, 1, 0};
    const std::vector<std::uint8_t> rx{0, 1, 1, 0, 1, 0, 1, 0};
    const ErrorCounts e = count_errors(tx, rx, 4);
    CHECK(e.bit_errors == 2);
    CHECK(e.symbol_errors == 1);
    CHECK(count_errors(tx, tx, 2).bit_errors == 0);
    const std::vector<std::uint8_t> short_rx{0, 1};
    CHECK_THROWS(count_errors(tx, short_rx, 2));
}
