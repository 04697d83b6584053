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

#include "hpgpn/channel_dump.hpp"
#include "hpgpn/montecarlo.hpp"

#include <cmath>
#include <sstream>

using namespace hpgpn;

namespace
{

ExperimentConfig small_config()
{
    ExperimentConfig cfg;
    cfg.channel.n_tx = 24;
    cfg.channel.n_rx = 6;
    cfg.n_s = cfg.n_rf = 2;
    cfg.n_channels = 8;
    cfg.n_symbols = 10;
    cfg.block_size = 4;
    cfg.min_bit_errors = 0;
    cfg.snr_db = {0.0, 20.0};
    cfg.schemes = {"16-QAM", "16-PQAM(4)"};
    return cfg;
}

std::vector<ChannelRecord> records_for(const ExperimentConfig& cfg, bool with_precoders)
{
    std::vector<ChannelRecord> out;
    for (std::uint64_t r = 0; r < cfg.n_channels; ++r)
    {
        PreparedChannel pc = prepare_channel(cfg, r);
        ChannelRecord rec{cfg.channel, r, pc.channel.h, std::nullopt};
        if (with_precoders)
            rec.precoders = pc.design.pset;
        out.push_back(rec);
    }
    return out;
}

} // namespace

TEST_CASE("dump round trip")
{
    const ExperimentConfig cfg = small_config();
    for (bool with : {false, true})
    {
        const std::vector<ChannelRecord> recs = records_for(cfg, with);
        std::stringstream ss;
        write_channel_dump(ss, recs);
        const std::string bytes = ss.str();
        CHECK(bytes.substr(0, 8) == "HPGPNCH1");
        const std::vector<ChannelRecord> back = read_channel_dump(ss);
        REQUIRE(back.size() == recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i)
        {
            CHECK(back[i].h == recs[i].h);
            CHECK(back[i].realization == recs[i].realization);
            CHECK(back[i].params.n_tx == 24);
            CHECK(back[i].params.angular_spread_deg == cfg.channel.angular_spread_deg);
            CHECK(back[i].precoders.has_value() == with);
            if (with)
            {
                CHECK(back[i].precoders->f_rf == recs[i].precoders->f_rf);
                CHECK(back[i].precoders->u_bb == recs[i].precoders->u_bb);
                CHECK(back[i].precoders->v_diag == recs[i].precoders->v_diag);
                CHECK(back[i].precoders->rho == recs[i].precoders->rho);
            }
        }
    }
}

TEST_CASE("malformed dumps are rejected")
{
    std::stringstream bad_magic("NOTADUMP........");
    CHECK_THROWS_AS(read_channel_dump(bad_magic), DumpFormatError);

    std::stringstream ss;
    write_channel_dump(ss, records_for(small_config(), true));
    const std::string bytes = ss.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(read_channel_dump(truncated), DumpFormatError);
}

TEST_CASE("analytic curves over dumped channels match the sweep's")
{
    const ExperimentConfig cfg = small_config();
    const SweepResult sweep = run_ber_sweep(cfg, 1);
    const SweepResult from_dump = evaluate_analytic(cfg, records_for(cfg, true));
    const SweepResult redesigned = evaluate_analytic(cfg, records_for(cfg, false));
    CHECK(from_dump.analytic_only);
    REQUIRE(from_dump.points.size() == sweep.points.size());
    for (std::size_t i = 0; i < sweep.points.size(); ++i)
    {
        CHECK(from_dump.points[i].ber_analytic == doctest::Approx(sweep.points[i].ber_analytic).epsilon(1e-12));
        CHECK(redesigned.points[i].ber_analytic == doctest::Approx(sweep.points[i].ber_analytic).epsilon(1e-12));
    }

    ExperimentConfig other = cfg;
    other.channel.n_tx = 32;
    CHECK_THROWS(evaluate_analytic(other, records_for(cfg, false)));
}
