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

#include "hpgpn/analytics.hpp"
#include "hpgpn/detection.hpp"
#include "hpgpn/modulation.hpp"
#include "hpgpn/rng.hpp"

#include <bit>
#include <cmath>

using namespace hpgpn;
namespace an = hpgpn::analytics;

namespace
{

double q_ref(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Bit error rate of a constellation over AWGN by direct simulation.
double simulated_awgn_ber(const Constellation& c, double beta, int n, std::uint64_t seed)
{
    StreamRng rng(seed, 0, 0);
    std::uint64_t errors = 0;
    for (int t = 0; t < n; ++t)
    {
        const auto i = static_cast<int>(rng.below(static_cast<std::uint32_t>(c.order())));
        const cd r = c.symbol(i) + rng.complex_normal(1.0 / beta);
        errors += std::popcount(static_cast<unsigned>(i ^ euclidean_detect(r, c)));
    }
    return static_cast<double>(errors) / (static_cast<double>(n) * c.bits_per_symbol());
}

RVec vec(std::initializer_list<double> xs)
{
    RVec v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs)
        v(i++) = x;
    return v;
}

} // namespace

TEST_CASE("Q function")
{
    CHECK(an::qfunc(0.0) == doctest::Approx(0.5));
    CHECK(an::qfunc(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-13));
    CHECK(an::qfunc(3.0) == doctest::Approx(1.3498980316301e-3).epsilon(1e-11));
    CHECK(an::qfunc(-1.0) == doctest::Approx(1.0 - 0.15865525393145707).epsilon(1e-13));
    CHECK(an::qfunc(10.0) > 0.0);
}

TEST_CASE("no-PN QAM bit error rate")
{
    for (double b : {0.5, 2.0, 10.0, 40.0})
    {
        CHECK(an::ber_no_pn_qam(vec({b}), 4) == doctest::Approx(q_ref(std::sqrt(b))).epsilon(1e-12));
        // Gray 16-QAM: (3Q(x) + 2Q(3x) - Q(5x)) / 4 with x = sqrt(beta / 5).
        const double x = std::sqrt(b / 5.0);
        const double ref16 = (3 * q_ref(x) + 2 * q_ref(3 * x) - q_ref(5 * x)) / 4.0;
        CHECK(an::ber_no_pn_qam(vec({b}), 16) == doctest::Approx(ref16).epsilon(1e-12));
    }
    // Stream averaging.
    const double avg = (an::ber_no_pn_qam(vec({3.0}), 16) + an::ber_no_pn_qam(vec({30.0}), 16)) / 2;
    CHECK(an::ber_no_pn_qam(vec({3.0, 30.0}), 16) == doctest::Approx(avg));
    CHECK_THROWS(an::ber_no_pn_qam(vec({1.0}), 8));
}

TEST_CASE("no-PN QAM bit error rate against simulation")
{
    for (int m : {16, 64})
    {
        const double beta = db_to_linear(m == 16 ? 12.0 : 18.0);
        const int n = 400000;
        const double sim = simulated_awgn_ber(build_qam(m), beta, n, static_cast<std::uint64_t>(m));
        const double ana = an::ber_no_pn_qam(vec({beta}), m);
        const double sd = std::sqrt(ana * 3.0 / (n * std::log2(m)));
        MESSAGE(m << "-QAM simulated " << sim << " analytic " << ana);
        CHECK(std::abs(sim - ana) < 4.0 * sd);
    }
}

TEST_CASE("rates")
{
    const RVec b = vec({1.0, 3.0, 15.0});
    CHECK(an::se_no_pn(b) == doctest::Approx(1.0 + 2.0 + 4.0));
    CHECK(an::pn_characteristic(0.1) == doctest::Approx(std::exp(-0.05)));
    CHECK(an::coherent_gain_sq(2.0, 0.1) == doctest::Approx(4.0 * std::exp(-0.1)));
    CHECK(an::interference_power_kappa(2.0, 0.1) == doctest::Approx(4.0 * (1.0 - std::exp(-0.1))));
    CHECK(an::combined_noise_power(0.3, 2.0) == doctest::Approx(0.6));

    // SINR assembled from the three terms.
    const double rho = 0.8, v = 1.7, xi = 1.2, s2 = 0.05, s = 0.01;
    const double sinr = rho * rho * std::exp(-s) * v * v / (rho * rho * (1 - std::exp(-s)) * v * v + s2 * xi);
    CHECK(an::pn_sinr(rho, v, xi, s2, s) == doctest::Approx(sinr).epsilon(1e-12));

    // High-SNR limits: n_s log2(1 / (1 - e^{-s})).
    CHECK(an::se_pn_high_snr(0.1, 4) == doctest::Approx(13.574).epsilon(1e-4));
    CHECK(an::se_pn_high_snr(0.01, 4) == doctest::Approx(26.60).epsilon(1e-3));
    CHECK(an::se_pn_high_snr(0.001, 4) == doctest::Approx(-4 * std::log2(1 - std::exp(-0.001))).epsilon(1e-12));
}

TEST_CASE("lower bound reduces to the no-PN rate and saturates")
{
    an::AnalyticInputs in;
    in.v_diag = vec({9.0, 6.0, 4.0, 2.5});
    in.xi = vec({1.1, 0.9, 1.3, 1.0});
    in.rho = 0.05;
    in.omega = 30.0;
    in.n_s = 4;
    in.snr_rx = db_to_linear(10.0);
    in.sigma2 = in.rho * in.rho * in.omega / in.snr_rx;
    CHECK((in.beta() - in.beta_rx()).norm() < 1e-12 * in.beta().norm());

    in.sigma2_psi = 0.0;
    CHECK(an::se_pn_lower_bound(in) == doctest::Approx(an::se_no_pn(in)).epsilon(1e-12));
    double prev = an::se_no_pn(in);
    for (double s : {0.001, 0.01, 0.1})
    {
        in.sigma2_psi = s;
        const double lb = an::se_pn_lower_bound(in);
        CHECK(lb < prev);
        prev = lb;
    }
    in.sigma2_psi = 0.1;
    in.snr_rx = 1e9;
    in.sigma2 = in.rho * in.rho * in.omega / in.snr_rx;
    CHECK(an::se_pn_lower_bound(in) == doctest::Approx(an::se_pn_high_snr(0.1, 4)).epsilon(1e-5));

    in.n_pil = 1;
    CHECK(an::se_pilot(in) == doctest::Approx(an::se_no_pn(RVec(in.beta().tail(3)))));
    CHECK(an::ber_no_pn_qam(in) == doctest::Approx(an::ber_no_pn_qam(RVec(in.beta().tail(3)), 16)));
}

TEST_CASE("error floors")
{
    // 4-QAM under pure rotation: each bit flips when |psi| passes pi/4 on one side.
    CHECK(an::ber_4qam_floor(0.1) == doctest::Approx(q_ref(kPi / 4 / std::sqrt(0.1))).epsilon(1e-12));
    CHECK(an::ber_4qam_floor(0.1) == doctest::Approx(6.50e-3).epsilon(0.002));
    CHECK(an::ber_pqam_floor(0.1, 4, 1) == doctest::Approx(an::ber_4qam_floor(0.1)));
    CHECK(an::ber_16qam_floor(0.1) == doctest::Approx(4.03e-2).epsilon(0.002));
    // Ring-wise phase gaps of 16-QAM give (Q(pi/4/s) + Q(atan(1/3)/s)) / 4.
    const double s = std::sqrt(0.1);
    CHECK(an::ber_16qam_floor(0.1) ==
          doctest::Approx((q_ref(kPi / 4 / s) + q_ref(std::atan(1.0 / 3.0) / s)) / 4).epsilon(1e-12));
    CHECK(an::ber_pqam_floor(0.1, 16, 8) < 1e-4);
    CHECK(an::ber_pqam_floor(0.1, 16, 4) > 1e-4);
    CHECK(an::ber_pqam_floor(0.1, 16, 8) < an::ber_pqam_floor(0.1, 16, 4));
}

TEST_CASE("BER under phase noise approaches the floors")
{
    const RVec big = vec({1e10, 1e10});
    CHECK(an::ber_16qam_pn(big, 0.1) == doctest::Approx(an::ber_16qam_floor(0.1)).epsilon(1e-6));
    CHECK(an::qam16_stream_error(1e10, 0.1) ==
          doctest::Approx(4.0 * an::ber_16qam_floor(0.1)).epsilon(1e-6));
    const an::Qam16LevelErrors lv = an::qam16_level_errors(1e10, 0.1);
    CHECK(lv.symbol_error() == doctest::Approx(an::qam16_stream_error(1e10, 0.1)));
    CHECK(an::pqam_stream_ber(1.0, 1.0, 1.0, 1e10, 0.1, 16, 8) ==
          doctest::Approx(an::ber_pqam_floor(0.1, 16, 8)).epsilon(1e-6));
    CHECK(an::pqam_stream_ber(1.0, 1.0, 1.0, 1e10, 0.1, 4, 1) ==
          doctest::Approx(an::ber_4qam_floor(0.1)).epsilon(1e-6));
    // More noise never helps.
    double prev = 1.0;
    for (double db : {0.0, 10.0, 20.0, 30.0})
    {
        const double b = an::ber_16qam_pn(vec({db_to_linear(db)}), 0.01);
        CHECK(b < prev);
        prev = b;
    }
}
