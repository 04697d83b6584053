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

#include "hpgpn/channel_dump.hpp"
#include "hpgpn/config.hpp"
#include "hpgpn/montecarlo.hpp"
#include "hpgpn/report.hpp"
#include "hpgpn/validation.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace hpgpn;

namespace
{

// Exit codes: 0 ok, 1 runtime failure or failed validation, 2 invalid input.
constexpr int kRuntimeFailure = 1;
constexpr int kInvalidInput = 2;

class UsageError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct Common
{
    std::string config_path;
    std::string preset;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::string workers = "auto";
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_config = true)
{
    if (with_config)
    {
        cmd->add_option("--config", c.config_path, "Experiment config file (JSON, comments allowed)");
        cmd->add_option("--preset", c.preset, "Shipped preset name, e.g. paper-fig5");
        cmd->add_option("--override", c.overrides, "key=value, dotted or unique leaf name (repeatable)");
    }
    cmd->add_option("--out", c.out_dir, "Output directory (default $HPGPN_OUT_DIR or .)");
    cmd->add_option("--workers", c.workers, "Worker threads, integer or 'auto'");
    cmd->add_option("--seed", c.seed, "Master seed, overrides the config");
    cmd->add_flag("-q,--quiet", c.quiet, "No progress on stderr");
}

unsigned parse_workers(const std::string& w)
{
    if (w == "auto")
        return std::max(1u, std::thread::hardware_concurrency());
    try
    {
        std::size_t pos = 0;
        const long n = std::stol(w, &pos);
        if (pos == w.size() && n >= 1 && n <= 1024)
            return static_cast<unsigned>(n);
    }
    catch (const std::exception&)
    {
    }
    throw UsageError("--workers: expected a positive integer or 'auto', got '" + w + "'");
}

fs::path out_dir(const Common& c)
{
    fs::path dir = c.out_dir;
    if (dir.empty())
    {
        const char* env = std::getenv("HPGPN_OUT_DIR");
        dir = env && *env ? fs::path(env) : fs::path(".");
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw UsageError("--out: cannot create directory " + dir.string());
    return dir;
}

nlohmann::json load_doc(const Common& c)
{
    if (!c.config_path.empty() && !c.preset.empty())
        throw UsageError("give either --config or --preset, not both");
    nlohmann::json doc = nlohmann::json::object();
    if (!c.preset.empty())
        doc = load_config_file(find_preset(c.preset));
    else if (!c.config_path.empty())
        doc = load_config_file(c.config_path);
    doc = merge_with_defaults(doc);
    for (const std::string& o : c.overrides)
        apply_override(doc, o);
    if (c.seed)
        doc["sweep"]["master_seed"] = *c.seed;
    return doc;
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
}

ProgressFn progress_printer(bool quiet)
{
    if (quiet)
        return {};
    return [](std::uint64_t done, std::uint64_t total) {
        std::cerr << fmt::format("\r  {}/{} channel realizations", done, total) << std::flush;
        if (done == total)
            std::cerr << '\n';
    };
}

void write_outputs(const fs::path& dir, const SweepResult& res)
{
    const std::string id = res.config.experiment_id;
    write_file(dir / (id + "_montecarlo.csv"), results_csv(res, RowSource::MonteCarlo));
    write_file(dir / (id + "_analytic.csv"), results_csv(res, RowSource::Analytic));
    write_file(dir / (id + ".json"), sidecar_json(res).dump(2) + "\n");
}

int cmd_sweep(const Common& c, std::optional<SweepKind> forced)
{
    nlohmann::json doc = load_doc(c);
    if (forced)
        doc["kind"] = *forced == SweepKind::Se ? "se" : "ber";
    const ExperimentConfig cfg = config_from_json(doc);
    const unsigned workers = parse_workers(c.workers);
    const fs::path dir = out_dir(c);
    if (!c.quiet)
        std::cerr << fmt::format("{}: {} sweep, {} channels, {} workers\n", cfg.experiment_id,
                                 cfg.kind == SweepKind::Se ? "SE" : "BER", cfg.n_channels, workers);
    const SweepResult res = run_sweep(cfg, workers, progress_printer(c.quiet));
    write_outputs(dir, res);
    if (!c.quiet)
    {
        std::cerr << fmt::format("wrote {}/{}_{{montecarlo,analytic}}.csv and {}.json\n", dir.string(),
                                 cfg.experiment_id, cfg.experiment_id);
        for (const std::string& d : res.deviations)
            std::cerr << "note: " << d << '\n';
    }
    return 0;
}

std::string file_stem(const std::string& scheme)
{
    std::string s;
    for (char ch : scheme)
        if (std::isalnum(static_cast<unsigned char>(ch)))
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    return s;
}

int cmd_constellation(const Common& c, const std::string& scheme, bool scatter, double snr_db,
                      const std::string& regime, std::uint64_t n_symbols)
{
    std::optional<Constellation> con;
    try
    {
        con = parse_scheme(scheme);
    }
    catch (const std::exception& e)
    {
        throw UsageError(std::string("--scheme: ") + e.what());
    }
    const fs::path dir = out_dir(c);
    std::ostringstream os;
    write_constellation_csv(os, *con);
    const fs::path path = dir / ("constellation_" + file_stem(scheme) + ".csv");
    write_file(path, os.str());
    if (!c.quiet)
        std::cerr << "wrote " << path.string() << '\n';
    if (!scatter)
        return 0;

    const ExperimentConfig cfg = config_from_json(load_doc(c));
    PnConfig pn;
    try
    {
        pn = PnConfig::from_regime(parse_pn_regime(regime));
    }
    catch (const std::exception& e)
    {
        throw UsageError(std::string("--pn: ") + e.what());
    }
    std::ostringstream ss;
    write_scatter_csv(ss, received_scatter(cfg, scheme, snr_db, pn, n_symbols));
    const fs::path spath = dir / ("scatter_" + file_stem(scheme) + ".csv");
    write_file(spath, ss.str());
    if (!c.quiet)
        std::cerr << "wrote " << spath.string() << '\n';
    return 0;
}

int cmd_validate(const Common& c, bool full, std::uint64_t n_channels, const std::string& fault,
                 bool skip_acceptance)
{
    ValidationOptions opts;
    opts.workers = parse_workers(c.workers);
    if (c.seed)
        opts.seed = *c.seed;
    opts.n_channels = full ? 10000 : n_channels;
    if (fault == "pn-sign")
        opts.fault = InjectedFault::PnSign;
    else if (!fault.empty() && fault != "none")
        throw UsageError("--inject-fault: unknown fault '" + fault + "'");
    opts.on_result = [](const CheckResult& r) {
        std::cout << fmt::format("{} {}: {}\n", r.passed ? "PASS" : "FAIL", r.name, r.detail) << std::flush;
    };

    std::vector<CheckResult> all = run_property_checks(opts);
    if (!skip_acceptance)
    {
        std::vector<CheckResult> acc = run_acceptance_checks(opts);
        all.insert(all.end(), acc.begin(), acc.end());
    }
    const nlohmann::json report = validation_report(all);
    const fs::path path = out_dir(c) / "validation.json";
    write_file(path, report.dump(2) + "\n");

    std::vector<std::string> failed;
    for (const CheckResult& r : all)
        if (!r.passed)
            failed.push_back(r.name);
    if (failed.empty())
    {
        std::cout << fmt::format("all {} checks passed; report in {}\n", all.size(), path.string());
        return 0;
    }
    std::string names;
    for (const std::string& n : failed)
        names += (names.empty() ? "" : ", ") + n;
    std::cerr << fmt::format("validation failed: {}\n", names);
    return kRuntimeFailure;
}

int cmd_channels(const Common& c, std::uint64_t count, const std::string& file, bool with_precoders)
{
    const ExperimentConfig cfg = config_from_json(load_doc(c));
    std::vector<ChannelRecord> records;
    records.reserve(count);
    for (std::uint64_t r = 0; r < count; ++r)
    {
        PreparedChannel pc = prepare_channel(cfg, r);
        ChannelRecord rec{cfg.channel, r, std::move(pc.channel.h), std::nullopt};
        if (with_precoders)
            rec.precoders = std::move(pc.design.pset);
        records.push_back(std::move(rec));
    }
    const fs::path path = out_dir(c) / file;
    std::ofstream out(path, std::ios::binary);
    write_channel_dump(out, records);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    if (!c.quiet)
        std::cerr << fmt::format("wrote {} channel records to {}\n", count, path.string());
    return 0;
}

int cmd_analytic(const Common& c, const std::string& dump)
{
    const ExperimentConfig cfg = config_from_json(load_doc(c));
    std::ifstream in(dump, std::ios::binary);
    if (!in)
        throw UsageError("--dump: cannot open " + dump);
    std::vector<ChannelRecord> records;
    try
    {
        records = read_channel_dump(in);
    }
    catch (const DumpFormatError& e)
    {
        throw UsageError(dump + ": " + e.what());
    }
    const SweepResult res = evaluate_analytic(cfg, records);
    const fs::path path = out_dir(c) / (cfg.experiment_id + "_analytic.csv");
    write_file(path, results_csv(res, RowSource::Analytic));
    if (!c.quiet)
        std::cerr << fmt::format("wrote analytic curves over {} channels to {}\n", records.size(), path.string());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Link-level simulator for hybrid-precoding MIMO under Gaussian phase noise"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "hpgpn 1.0.0");

    Common common;

    auto* run = app.add_subcommand("run", "Run the sweep kind named in the config");
    add_common(run, common);
    auto* ber = app.add_subcommand("ber", "Monte Carlo BER sweep with analytic overlays");
    add_common(ber, common);
    auto* se = app.add_subcommand("se", "Spectral-efficiency sweep");
    add_common(se, common);

    std::string scheme = "16-QAM", regime = "medium";
    bool scatter = false;
    double scatter_snr = 30.0;
    std::uint64_t scatter_symbols = 1000;
    auto* con = app.add_subcommand("constellation", "Dump constellation points, optionally a received scatter");
    add_common(con, common);
    con->add_option("--scheme", scheme, "e.g. 16-QAM, 16-PQAM(4)");
    con->add_flag("--scatter", scatter, "Also write received points for one channel realization");
    con->add_option("--snr", scatter_snr, "Scatter SNR in dB");
    con->add_option("--pn", regime, "Scatter phase-noise regime: off, low, medium, strong");
    con->add_option("--symbols", scatter_symbols, "Received points in the scatter");

    bool full = false, skip_acceptance = false;
    std::uint64_t val_channels = 500;
    std::string fault;
    auto* val = app.add_subcommand("validate", "Run property and acceptance checks");
    add_common(val, common, false);
    val->add_flag("--full", full, "Acceptance checks at 10^4 channel realizations");
    val->add_option("--channels", val_channels, "Channel realizations for the quick acceptance set")
        ->check(CLI::PositiveNumber);
    val->add_flag("--properties-only", skip_acceptance, "Skip the Monte Carlo acceptance set");
    val->add_option("--inject-fault", fault, "Deliberate bug for mutation testing: pn-sign");

    std::uint64_t n_dump = 10;
    std::string dump_file = "channels.bin";
    bool with_precoders = false;
    auto* chan = app.add_subcommand("channels", "Write channel realizations to a binary dump");
    add_common(chan, common);
    chan->add_option("--count", n_dump, "Number of realizations")->check(CLI::PositiveNumber);
    chan->add_option("--file", dump_file, "File name inside the output directory");
    chan->add_flag("--precoders", with_precoders, "Include the hybrid design of each realization");

    std::string dump_in;
    auto* ana = app.add_subcommand("analytic", "Analytic curves over channels read from a dump");
    add_common(ana, common);
    ana->add_option("--dump", dump_in, "Channel dump file")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInvalidInput;
    }

    try
    {
        if (run->parsed())
            return cmd_sweep(common, std::nullopt);
        if (ber->parsed())
            return cmd_sweep(common, SweepKind::Ber);
        if (se->parsed())
            return cmd_sweep(common, SweepKind::Se);
        if (con->parsed())
            return cmd_constellation(common, scheme, scatter, scatter_snr, regime, scatter_symbols);
        if (val->parsed())
            return cmd_validate(common, full, val_channels, fault, skip_acceptance);
        if (chan->parsed())
            return cmd_channels(common, n_dump, dump_file, with_precoders);
        if (ana->parsed())
            return cmd_analytic(common, dump_in);
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kInvalidInput;
    }
    catch (const UsageError& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kRuntimeFailure;
}
