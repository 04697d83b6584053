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

#include "hpgpn/config.hpp"
#include "hpgpn/report.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

using namespace hpgpn;
using nlohmann::json;

namespace
{

ExperimentConfig parse(const std::string& text)
{
    return config_from_json(merge_with_defaults(parse_config_text(text)));
}

std::string error_of(const std::string& text)
{
    try
    {
        parse(text);
    }
    catch (const ConfigError& e)
    {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("defaults need a phase-noise level")
{
    CHECK(error_of("{}").find("pn") != std::string::npos);
    const ExperimentConfig cfg = parse(R"({"pn": {"regimes": ["strong"]}})");
    CHECK(cfg.channel.n_tx == 144);
    CHECK(cfg.channel.n_rx == 36);
    CHECK(cfg.channel.n_clusters == 5);
    CHECK(cfg.channel.n_rays == 10);
    CHECK(cfg.channel.angular_spread_deg == 10.0);
    CHECK(cfg.n_channels == 10000);
    CHECK(cfg.n_symbols == 100);
    CHECK(cfg.min_bit_errors == 200);
    REQUIRE(cfg.snr_db.size() == 21);
    CHECK(cfg.snr_db.front() == -10.0);
    CHECK(cfg.snr_db.back() == 40.0);
}

TEST_CASE("pn sections")
{
    const ExperimentConfig cfg = parse(R"({"pn": {"regimes": ["off", "medium"], "sigma2_psi": [0.05]}})");
    REQUIRE(cfg.pn.size() == 3);
    CHECK(cfg.pn[0].sigma2_psi() == 0.0);
    CHECK(cfg.pn[1].sigma2_psi() == doctest::Approx(0.01));
    CHECK(cfg.pn[2].sigma2_psi() == doctest::Approx(0.05));
    CHECK(error_of(R"({"pn": {"regimes": ["huge"]}})").find("pn.regimes") != std::string::npos);
    CHECK(error_of(R"({"pn": {"sigma2_psi": [-1]}})").find("pn.sigma2_psi") != std::string::npos);
}

TEST_CASE("diagnostics name the field or position")
{
    CHECK(error_of("{\n  \"pn\": {\"regimes\": [\"strong\"]},\n  \"sweep\": {\"n_s\": }\n}").find(":3:") !=
          std::string::npos);
    CHECK(error_of(R"({"pn": {"regimes": ["strong"]}, "sweep": {"n_s": "four"}})").find("sweep.n_s") !=
          std::string::npos);
    CHECK(error_of(R"({"pn": {"regimes": ["strong"]}, "sweep": {"nchannels": 5}})").find("nchannels") !=
          std::string::npos);
    CHECK(error_of(R"({"pn": {"regimes": ["strong"]}, "sweep": {"n_pil": 4}})").find("n_pil") !=
          std::string::npos);
    CHECK(error_of(R"({"pn": {"regimes": ["strong"]}, "sweep": {"schemes": ["32-APSK"]}})").find("schemes") !=
          std::string::npos);
    CHECK(error_of(R"({"pn": {"regimes": ["strong"]}, "experiment_id": "a/b"})").find("experiment_id") !=
          std::string::npos);
}

TEST_CASE("overrides")
{
    json doc = merge_with_defaults(parse_config_text(R"({"pn": {"regimes": ["strong"]}})"));
    apply_override(doc, "snr_db=0:5:40");
    apply_override(doc, "sweep.n_channels=250");
    apply_override(doc, "n_tx=64");
    apply_override(doc, "schemes=4-QAM,16-PQAM(8)");
    apply_override(doc, "pn.regimes=[\"low\",\"strong\"]");
    const ExperimentConfig cfg = config_from_json(doc);
    CHECK(cfg.snr_db == std::vector<double>{0, 5, 10, 15, 20, 25, 30, 35, 40});
    CHECK(cfg.n_channels == 250);
    CHECK(cfg.channel.n_tx == 64);
    CHECK(cfg.schemes == std::vector<std::string>{"4-QAM", "16-PQAM(8)"});
    CHECK(cfg.pn.size() == 2);
    CHECK_THROWS_AS(apply_override(doc, "no_such_key=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "n_channels"), ConfigError);
}

TEST_CASE("SNR grids")
{
    CHECK(parse_snr_grid("15:2.5:20") == std::vector<double>{15, 17.5, 20});
    CHECK(parse_snr_grid(json::array({1, 2})) == std::vector<double>{1, 2});
    CHECK(parse_snr_grid(json(3.5)) == std::vector<double>{3.5});
    CHECK(parse_snr_grid("7") == std::vector<double>{7});
    CHECK_THROWS_AS(parse_snr_grid("5:0:10"), ConfigError);
    CHECK_THROWS_AS(parse_snr_grid("10:1:5"), ConfigError);
    CHECK_THROWS_AS(parse_snr_grid("a:b"), ConfigError);
}

TEST_CASE("config round trip")
{
    const ExperimentConfig a = parse(R"({"experiment_id": "rt", "kind": "se",
        "pn": {"regimes": ["low"], "sigma2_psi": [0.2]},
        "sweep": {"snr_db": [1, 2], "detectors": ["PM", "EUC", "PM"], "n_pil": 1, "master_seed": 99}})");
    CHECK(a.detectors.size() == 2);
    const ExperimentConfig b = config_from_json(config_to_json(a));
    CHECK(config_to_json(a) == config_to_json(b));
    CHECK(b.kind == SweepKind::Se);
    CHECK(b.master_seed == 99);
    CHECK(b.n_pil == 1);
}

TEST_CASE("shipped presets")
{
    const std::vector<std::string> names = list_presets();
    for (int f = 4; f <= 9; ++f)
    {
        const std::string name = "paper-fig" + std::to_string(f);
        CAPTURE(name);
        REQUIRE(std::find(names.begin(), names.end(), name) != names.end());
        const ExperimentConfig cfg = config_from_json(merge_with_defaults(load_config_file(find_preset(name))));
        CHECK(cfg.experiment_id == name);
        CHECK(cfg.channel.n_tx == 144);
        CHECK(cfg.channel.n_rx == 36);
        CHECK(cfg.channel.n_clusters == 5);
        CHECK(cfg.channel.n_rays == 10);
        CHECK(cfg.channel.angular_spread_deg == 10.0);
        CHECK(cfg.n_channels == 10000);
        CHECK(cfg.snr_db.size() == 21);
    }
    const auto load = [](const char* n) { return config_from_json(merge_with_defaults(load_config_file(find_preset(n)))); };
    const ExperimentConfig f4 = load("paper-fig4");
    CHECK(f4.kind == SweepKind::Se);
    CHECK(f4.pn.size() == 4);
    CHECK(f4.n_s == 4);
    const ExperimentConfig f9 = load("paper-fig9");
    CHECK(f9.n_s == 8);
    CHECK(f9.n_rf == 8);
    CHECK(f9.n_pil == 1);
    CHECK(f9.pn.size() == 1);
    CHECK(f9.pn[0].sigma2_psi() == doctest::Approx(0.1));
    CHECK_THROWS_AS(find_preset("paper-fig99"), ConfigError);
}

TEST_CASE("number formatting")
{
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-10) == "-10");
    CHECK(format_number(6.5e-3) == "0.0065");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()).empty());
    const double x = 0.1 + 0.2;
    CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("results CSV")
{
    ExperimentConfig cfg;
    cfg.experiment_id = "csv";
    cfg.channel.n_tx = 32;
    cfg.channel.n_rx = 8;
    cfg.n_s = cfg.n_rf = 2;
    cfg.n_channels = 12;
    cfg.n_symbols = 20;
    cfg.block_size = 6;
    cfg.snr_db = {5.0, 30.0};
    cfg.schemes = {"4-QAM", "16-QAM"};
    cfg.detectors = {DetectorKind::Euclidean, DetectorKind::Polar};
    const SweepResult r = run_ber_sweep(cfg, 2);
    const std::string mc = results_csv(r, RowSource::MonteCarlo);
    const std::string an = results_csv(r, RowSource::Analytic);
    const std::string header =
        "experiment_id,source,snr_db,sigma2_psi,modulation,shape_gamma,detector,n_s,n_rf,n_pil,n_t,n_r,ber,"
        "bit_errors,bits_sent,ci95,se_bps_hz,n_channels,master_seed\n";
    CHECK(mc.rfind(header, 0) == 0);
    CHECK(an.rfind(header, 0) == 0);
    // Byte-stable for a fixed config and seed.
    CHECK(mc == results_csv(run_ber_sweep(cfg, 1), RowSource::MonteCarlo));

    std::istringstream in(mc);
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line))
    {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 18);
        CHECK(line.rfind("csv,montecarlo,", 0) == 0);
    }
    CHECK(rows == 2 * 2 * 2); // snr x scheme x detector
    // Analytic: one row per grid point plus floor rows under strong phase noise.
    CHECK(an.find("csv,analytic,30,0.1,16-QAM,0,none,") != std::string::npos);
    CHECK(an.find("csv/floor,analytic,30,0.1,4-QAM,") != std::string::npos);

    const json side = sidecar_json(r);
    CHECK(side["config"]["experiment_id"] == "csv");
    CHECK(side["columns"].size() == 19);
}

TEST_CASE("constellation CSV")
{
    std::ostringstream os;
    write_constellation_csv(os, build_pqam(16, 4));
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "index,bits,re,im,ring,phase_index");
    std::set<std::string> rings;
    int rows = 0;
    while (std::getline(in, line))
    {
        ++rows;
        std::vector<std::string> cols;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');)
            cols.push_back(c);
        REQUIRE(cols.size() == 6);
        rings.insert(cols[4]);
    }
    CHECK(rows == 16);
    CHECK(rings.size() == 4);

    std::ostringstream q;
    write_constellation_csv(q, build_qam(16));
    const std::string text = q.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 17);
}
