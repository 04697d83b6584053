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

#include "hpgpn/report.hpp"

#include "hpgpn/config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

namespace hpgpn
{

const std::vector<std::string> kResultColumns{
    "experiment_id", "source",    "snr_db", "sigma2_psi", "modulation", "shape_gamma", "detector",
    "n_s",           "n_rf",      "n_pil",  "n_t",        "n_r",        "ber",         "bit_errors",
    "bits_sent",     "ci95",      "se_bps_hz", "n_channels", "master_seed"};

namespace
{

struct Row
{
    std::string id;
    const char* source;
    const GridPoint* p;
    std::string ber, bit_errors, bits_sent, ci95, se;
    std::string detector;
};

void emit(std::ostream& os, const ExperimentConfig& cfg, const Row& r)
{
    const GridPoint& p = *r.p;
    const bool se_row = p.curve != "ber";
    os << r.id << ',' << r.source << ',' << format_number(p.snr_db) << ','
       << (p.has_pn ? format_number(p.sigma2_psi) : std::string()) << ',' << p.modulation << ','
       << (se_row ? std::string() : std::to_string(p.shape_gamma)) << ',' << r.detector << ','
       << cfg.n_s << ',' << cfg.n_rf << ',' << cfg.n_pil << ',' << cfg.channel.n_tx << ','
       << cfg.channel.n_rx << ',' << r.ber << ',' << r.bit_errors << ',' << r.bits_sent << ','
       << r.ci95 << ',' << r.se << ',' << p.n_channels << ',' << cfg.master_seed << '\n';
}

} // namespace

std::string format_number(double x)
{
    if (std::isnan(x))
        return {};
    return fmt::format("{}", x);
}

void write_results_csv(std::ostream& os, const SweepResult& result, RowSource source)
{
    const ExperimentConfig& cfg = result.config;
    for (std::size_t i = 0; i < kResultColumns.size(); ++i)
        os << (i ? "," : "") << kResultColumns[i];
    os << '\n';

    const bool want_mc = source == RowSource::MonteCarlo;
    std::set<std::uint32_t> seen;
    for (const GridPoint& p : result.points)
    {
        Row r{cfg.experiment_id, want_mc ? "montecarlo" : "analytic", &p, "", "", "", "", "", "none"};
        if (p.curve != "ber")
        {
            // Channel-averaged rate curves; the closed-form high-SNR limit is the analytic part.
            r.id = cfg.experiment_id + "/" + p.curve;
            if (want_mc != result.analytic_only)
            {
                r.se = format_number(p.se_mc);
                emit(os, cfg, r);
            }
            if (!want_mc && std::isfinite(p.se_analytic))
            {
                r.id = cfg.experiment_id + "/" + p.curve + "_high_snr";
                r.se = format_number(p.se_analytic);
                emit(os, cfg, r);
            }
            continue;
        }
        if (want_mc)
        {
            if (result.analytic_only)
                continue;
            r.detector = p.detector;
            r.ber = format_number(p.ber);
            r.bit_errors = std::to_string(p.bit_errors);
            r.bits_sent = std::to_string(p.bits_sent);
            r.ci95 = format_number(p.ci95);
            emit(os, cfg, r);
            continue;
        }
        if (!seen.insert(p.grid_index).second)
            continue;
        if (std::isfinite(p.ber_analytic))
        {
            r.ber = format_number(p.ber_analytic);
            emit(os, cfg, r);
        }
        if (std::isfinite(p.ber_floor))
        {
            r.id = cfg.experiment_id + "/floor";
            r.ber = format_number(p.ber_floor);
            emit(os, cfg, r);
        }
    }
}

std::string results_csv(const SweepResult& result, RowSource source)
{
    std::ostringstream os;
    write_results_csv(os, result, source);
    return os.str();
}

nlohmann::json sidecar_json(const SweepResult& result)
{
    nlohmann::json j;
    j["config"] = config_to_json(result.config);
    j["columns"] = kResultColumns;
    j["analytic_only"] = result.analytic_only;
    j["channels_resampled"] = result.channels_resampled;
    j["altmin_not_converged"] = result.altmin_not_converged;
    if (result.config.kind == SweepKind::Se)
    {
        j["hp_above_fdp"] = result.hp_above_fdp;
        j["hp_above_fdp_same_noise"] = result.hp_above_fdp_same_noise;
        j["max_relative_gap_pn0"] = result.max_pn0_gap;
    }
    j["deviations"] = result.deviations;
    j["rng"] = "philox4x32-10; counter = (block, grid index, realization lo, realization hi); key = master_seed";
    return j;
}

void write_constellation_csv(std::ostream& os, const Constellation& c)
{
    os << "index,bits,re,im,ring,phase_index\n";
    const int b = c.bits_per_symbol();
    for (int i = 0; i < c.order(); ++i)
    {
        std::string bits;
        for (int j = b - 1; j >= 0; --j)
            bits.push_back(((i >> j) & 1) ? '1' : '0');
        const cd s = c.symbol(i);
        os << i << ',' << bits << ',' << format_number(s.real()) << ',' << format_number(s.imag())
           << ',' << c.rings()[static_cast<std::size_t>(i)] << ','
           << c.phase_indices()[static_cast<std::size_t>(i)] << '\n';
    }
}

void write_scatter_csv(std::ostream& os, const std::vector<ScatterSample>& samples)
{
    os << "sample,stream,tx_index,rx_re,rx_im\n";
    for (const ScatterSample& s : samples)
        os << s.sample << ',' << s.stream << ',' << s.tx_index << ',' << format_number(s.rx.real())
           << ',' << format_number(s.rx.imag()) << '\n';
}

} // namespace hpgpn
