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
#include "hpgpn/montecarlo.hpp"

#include <bit>
#include <cmath>
#include <set>

using namespace hpgpn;

namespace
{

ExperimentConfig small_config()
{
    ExperimentConfig cfg;
    cfg.channel.n_tx = 32;
    cfg.channel.n_rx = 8;
    cfg.n_s = 2;
    cfg.n_rf = 2;
    cfg.n_channels = 40;
    cfg.n_symbols = 50;
    cfg.block_size = 10;
    cfg.snr_db = {0.0, 10.0};
    cfg.master_seed = 5;
    return cfg;
}

bool identical(const SweepResult& a, const SweepResult& b)
{
    if (a.points.size() != b.points.size())
        return false;
    auto same = [](double x, double y) { return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y); };
    for (std::size_t i = 0; i < a.points.size(); ++i)
    {
        const GridPoint& p = a.points[i];
        const GridPoint& q = b.points[i];
        if (p.bit_errors != q.bit_errors || p.bits_sent != q.bits_sent || p.n_channels != q.n_channels ||
            !same(p.ber_analytic, q.ber_analytic) || !same(p.se_mc, q.se_mc) || p.curve != q.curve)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("config validation")
{
    ExperimentConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.n_pil = 2;
    CHECK_THROWS(cfg.validate());
    cfg = small_config();
    cfg.n_rf = 1;
    CHECK_THROWS(cfg.validate());
    cfg = small_config();
    cfg.snr_db.clear();
    CHECK_THROWS(cfg.validate());
    cfg = small_config();
    cfg.schemes = {"8-PSK"};
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("grid indices leave the detector out")
{
    ExperimentConfig cfg = small_config();
    cfg.pn = {PnConfig::from_regime(PnRegime::Strong), PnConfig::from_regime(PnRegime::Low)};
    cfg.schemes = {"4-QAM", "16-QAM", "16-PQAM(4)"};
    std::set<std::uint32_t> seen;
    for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t s = 0; s < 3; ++s)
            for (std::size_t k = 0; k < 2; ++k)
                seen.insert(ber_grid_index(cfg, p, s, k));
    CHECK(seen.size() == 12);
    CHECK(*seen.rbegin() == 11u);
}

TEST_CASE("sweeps are reproducible and independent of worker count")
{
    ExperimentConfig cfg = small_config();
    cfg.detectors = {DetectorKind::Euclidean, DetectorKind::Polar};
    cfg.min_bit_errors = 30;
    const SweepResult a = run_ber_sweep(cfg, 1);
    CHECK(identical(a, run_ber_sweep(cfg, 1)));
    CHECK(identical(a, run_ber_sweep(cfg, 3)));
    cfg.kind = SweepKind::Se;
    const SweepResult s = run_se_sweep(cfg, 1);
    CHECK(identical(s, run_se_sweep(cfg, 2)));
    CHECK(identical(s, run_sweep(cfg, 2)));
    cfg.master_seed = 6;
    CHECK_FALSE(identical(s, run_se_sweep(cfg, 1)));
}

TEST_CASE("early stopping works on whole blocks")
{
    ExperimentConfig cfg = small_config();
    cfg.snr_db = {-5.0};
    cfg.min_bit_errors = 1;
    const SweepResult r = run_ber_sweep(cfg, 2);
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].n_channels == cfg.block_size);
    CHECK(r.points[0].bits_sent == cfg.block_size * cfg.n_symbols * 2 * 4);
    cfg.min_bit_errors = 0;
    CHECK(run_ber_sweep(cfg, 2).points[0].n_channels == cfg.n_channels);
}

TEST_CASE("without phase noise the simulated BER agrees with the semi-analytical one")
{
    ExperimentConfig cfg = small_config();
    cfg.pn = {PnConfig::from_regime(PnRegime::Off)};
    cfg.snr_db = {-5.0, 0.0, 5.0};
    cfg.n_channels = 200;
    cfg.n_symbols = 200;
    cfg.min_bit_errors = 0;
    const SweepResult r = run_ber_sweep(cfg, 2);
    for (const GridPoint& p : r.points)
    {
        const double sd = std::sqrt(p.ber_analytic * (1 - p.ber_analytic) / static_cast<double>(p.bits_sent));
        MESSAGE(p.snr_db << " dB: simulated " << p.ber << " analytic " << p.ber_analytic);
        // Bits within a symbol are correlated, so allow a wider band than the binomial one.
        CHECK(std::abs(p.ber - p.ber_analytic) < 6.0 * sd);
        CHECK(std::isnan(p.ber_floor));
    }
    CHECK(r.deviations.empty());
}

TEST_CASE("confidence interval")
{
    CHECK(binomial_ci95(100, 10000) == doctest::Approx(1.96 * std::sqrt(0.01 * 0.99 / 10000)));
    CHECK(binomial_ci95(0, 100) == 0.0);
    CHECK(std::isnan(binomial_ci95(0, 0)));
}

TEST_CASE("SE sweep curves")
{
    ExperimentConfig cfg = small_config();
    cfg.kind = SweepKind::Se;
    cfg.pn = {PnConfig::from_regime(PnRegime::Off), PnConfig::from_regime(PnRegime::Strong)};
    cfg.snr_db = {0.0, 40.0};
    const SweepResult r = run_se_sweep(cfg, 1);
    CHECK(r.max_pn0_gap <= 1e-9);
    double no_pn40 = 0, bound40 = 0, bound40_off = 0, fdp40 = 0;
    for (const GridPoint& p : r.points)
    {
        if (p.snr_db != 40.0)
            continue;
        if (p.curve == "hp_no_pn")
            no_pn40 = p.se_mc;
        if (p.curve == "fdp")
            fdp40 = p.se_mc;
        if (p.curve == "hp_pn_bound" && p.sigma2_psi == 0.1)
        {
            bound40 = p.se_mc;
            CHECK(p.se_analytic == doctest::Approx(analytics::se_pn_high_snr(0.1, 2)));
        }
        if (p.curve == "hp_pn_bound" && p.sigma2_psi == 0.0)
            bound40_off = p.se_mc;
    }
    CHECK(bound40 < no_pn40);
    CHECK(bound40_off == doctest::Approx(no_pn40).epsilon(1e-12));
    CHECK(bound40 == doctest::Approx(analytics::se_pn_high_snr(0.1, 2)).epsilon(0.01));
    CHECK(no_pn40 / fdp40 > 0.9);
}

TEST_CASE("prepared channels have usable streams")
{
    ExperimentConfig cfg = small_config();
    for (std::uint64_t r = 0; r < 20; ++r)
    {
        const PreparedChannel pc = prepare_channel(cfg, r);
        CHECK(pc.attempts >= 1);
        CHECK(pc.design.pset.v_diag(cfg.n_s - 1) > 1e-10 * pc.design.pset.v_diag(0));
        CHECK(pc.xi.minCoeff() > 0.0);
        CHECK(pc.omega > 0.0);
    }
}

TEST_CASE("received scatter")
{
    ExperimentConfig cfg = small_config();
    const auto pts = received_scatter(cfg, "16-PQAM(4)", 30.0, PnConfig::from_regime(PnRegime::Medium), 101);
    REQUIRE(pts.size() == 101);
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        CHECK(pts[i].sample == i);
        CHECK(pts[i].stream == static_cast<Index>(i % 2));
        CHECK(pts[i].tx_index >= 0);
        CHECK(pts[i].tx_index < 16);
    }
    CHECK_THROWS(received_scatter(cfg, "7-QAM", 30.0, PnConfig{}, 10));
}
