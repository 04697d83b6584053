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

#include "hpgpn/config.hpp"

#include "hpgpn/modulation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hpgpn
{

using nlohmann::json;

namespace
{

[[noreturn]] void fail(const std::string& field, const std::string& what)
{
    throw ConfigError(field + ": " + what);
}

const json& at(const json& doc, const std::string& section, const std::string& key)
{
    return doc.at(section).at(key);
}

std::int64_t get_int(const json& v, const std::string& field, std::int64_t lo)
{
    if (!v.is_number_integer())
        fail(field, "expected an integer");
    std::int64_t x = v.get<std::int64_t>();
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
        fail(field, "value too large");
    if (x < lo)
        fail(field, fmt::format("must be >= {}", lo));
    return x;
}

std::uint64_t get_u64(const json& v, const std::string& field)
{
    if (v.is_number_unsigned())
        return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(field, "expected a non-negative integer");
}

double get_double(const json& v, const std::string& field)
{
    if (!v.is_number())
        fail(field, "expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x))
        fail(field, "must be finite");
    return x;
}

std::vector<std::string> get_strings(const json& v, const std::string& field)
{
    std::vector<std::string> out;
    if (v.is_string())
        out.push_back(v.get<std::string>());
    else if (v.is_array())
        for (const json& e : v)
        {
            if (!e.is_string())
                fail(field, "expected a list of strings");
            out.push_back(e.get<std::string>());
        }
    else
        fail(field, "expected a string or a list of strings");
    return out;
}

std::vector<double> get_doubles(const json& v, const std::string& field)
{
    std::vector<double> out;
    if (v.is_number())
        out.push_back(get_double(v, field));
    else if (v.is_array())
        for (const json& e : v)
            out.push_back(get_double(e, field));
    else
        fail(field, "expected a number or a list of numbers");
    return out;
}

void check_keys(const json& doc, const json& reference, const std::string& prefix)
{
    if (!doc.is_object())
        fail(prefix.empty() ? "config" : prefix, "expected an object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
    {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!reference.contains(it.key()))
            fail(path, "unknown key");
        if (reference.at(it.key()).is_object())
            check_keys(it.value(), reference.at(it.key()), path);
    }
}

void collect_leaves(const json& doc, const std::string& prefix, std::vector<std::string>& out)
{
    for (auto it = doc.begin(); it != doc.end(); ++it)
    {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it.value().is_object())
            collect_leaves(it.value(), path, out);
        else
            out.push_back(path);
    }
}

json parse_override_value(const std::string& text)
{
    json v = json::parse(text, nullptr, false);
    if (!v.is_discarded())
        return v;
    if (text.find(',') != std::string::npos)
    {
        json list = json::array();
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
            list.push_back(parse_override_value(item));
        return list;
    }
    return text;
}

double parse_number(const std::string& s, const std::string& field)
{
    std::size_t used = 0;
    double x = 0.0;
    try
    {
        x = std::stod(s, &used);
    }
    catch (const std::exception&)
    {
        fail(field, "cannot parse '" + s + "' as a number");
    }
    if (used != s.size())
        fail(field, "cannot parse '" + s + "' as a number");
    return x;
}

} // namespace

json default_config_json()
{
    return json{
        {"experiment_id", "custom"},
        {"kind", "ber"},
        {"channel",
         {{"n_tx", 144}, {"n_rx", 36}, {"n_clusters", 5}, {"n_rays", 10}, {"angular_spread_deg", 10.0}}},
        {"pn", {{"regimes", json::array()}, {"sigma2_psi", json::array()}}},
        {"sweep",
         {{"snr_db", "-10:2.5:40"},
          {"schemes", json::array({"16-QAM"})},
          {"detectors", json::array({"EUC"})},
          {"n_s", 4},
          {"n_rf", 4},
          {"n_pil", 0},
          {"n_channels", 10000},
          {"n_symbols", 100},
          {"master_seed", 1},
          {"min_bit_errors", 200},
          {"block_size", 500}}},
        {"precoding", {{"tol", 1e-6}, {"max_iter", 100}}},
    };
}

json parse_config_text(const std::string& text, const std::string& origin)
{
    try
    {
        return json::parse(text, nullptr, true, true);
    }
    catch (const json::parse_error& e)
    {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
        {
            if (text[i] == '\n')
            {
                ++line;
                col = 1;
            }
            else
                ++col;
        }
        throw ConfigError(fmt::format("{}:{}:{}: syntax error", origin, line, col));
    }
}

json load_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string() + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

json merge_with_defaults(const json& doc)
{
    json base = default_config_json();
    check_keys(doc, base, "");
    base.merge_patch(doc);
    return base;
}

void apply_override(json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "': expected key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    std::vector<std::string> leaves;
    collect_leaves(doc, "", leaves);
    std::string path;
    if (std::find(leaves.begin(), leaves.end(), key) != leaves.end())
        path = key;
    else
    {
        std::vector<std::string> hits;
        for (const std::string& leaf : leaves)
        {
            const auto dot = leaf.rfind('.');
            if ((dot == std::string::npos ? leaf : leaf.substr(dot + 1)) == key)
                hits.push_back(leaf);
        }
        if (hits.empty())
            throw ConfigError("override '" + key + "': unknown key");
        if (hits.size() > 1)
            throw ConfigError("override '" + key + "': ambiguous, use the dotted name");
        path = hits.front();
    }

    json* node = &doc;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.'))
        node = &(*node)[part];
    *node = parse_override_value(value);
}

std::vector<double> parse_snr_grid(const json& value)
{
    const std::string field = "sweep.snr_db";
    if (!value.is_string())
    {
        std::vector<double> out = get_doubles(value, field);
        if (out.empty())
            fail(field, "grid is empty");
        return out;
    }
    const std::string text = value.get<std::string>();
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':'))
        parts.push_back(item);
    if (parts.size() == 1)
        return {parse_number(parts[0], field)};
    if (parts.size() != 3)
        fail(field, "expected start:step:stop");
    const double a = parse_number(parts[0], field);
    const double step = parse_number(parts[1], field);
    const double b = parse_number(parts[2], field);
    if (!(step > 0.0) || b < a)
        fail(field, "range needs step > 0 and stop >= start");
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    if (n > 100000)
        fail(field, "range has too many points");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a + static_cast<double>(i) * step;
    return out;
}

ExperimentConfig config_from_json(const json& input)
{
    const json doc = merge_with_defaults(input);
    ExperimentConfig cfg;

    if (!doc.at("experiment_id").is_string() || doc.at("experiment_id").get<std::string>().empty())
        fail("experiment_id", "expected a non-empty string");
    cfg.experiment_id = doc.at("experiment_id").get<std::string>();
    if (cfg.experiment_id.find_first_of(",\"\n/") != std::string::npos)
        fail("experiment_id", "must not contain commas, quotes, slashes or newlines");

    const json& kind = doc.at("kind");
    if (kind == "ber")
        cfg.kind = SweepKind::Ber;
    else if (kind == "se")
        cfg.kind = SweepKind::Se;
    else
        fail("kind", "expected \"ber\" or \"se\"");

    cfg.channel.n_tx = get_int(at(doc, "channel", "n_tx"), "channel.n_tx", 1);
    cfg.channel.n_rx = get_int(at(doc, "channel", "n_rx"), "channel.n_rx", 1);
    cfg.channel.n_clusters = get_int(at(doc, "channel", "n_clusters"), "channel.n_clusters", 1);
    cfg.channel.n_rays = get_int(at(doc, "channel", "n_rays"), "channel.n_rays", 1);
    cfg.channel.angular_spread_deg =
        get_double(at(doc, "channel", "angular_spread_deg"), "channel.angular_spread_deg");

    cfg.pn.clear();
    for (const std::string& r : get_strings(at(doc, "pn", "regimes"), "pn.regimes"))
    {
        try
        {
            cfg.pn.push_back(PnConfig::from_regime(parse_pn_regime(r)));
        }
        catch (const InvalidParameter& e)
        {
            fail("pn.regimes", e.what());
        }
    }
    for (double s : get_doubles(at(doc, "pn", "sigma2_psi"), "pn.sigma2_psi"))
    {
        if (s < 0.0)
            fail("pn.sigma2_psi", "variance must be >= 0");
        cfg.pn.push_back(PnConfig::from_total(s));
    }
    if (cfg.pn.empty())
        fail("pn", "give at least one entry in pn.regimes or pn.sigma2_psi");

    cfg.snr_db = parse_snr_grid(at(doc, "sweep", "snr_db"));
    cfg.schemes = get_strings(at(doc, "sweep", "schemes"), "sweep.schemes");
    for (const std::string& s : cfg.schemes)
    {
        try
        {
            parse_scheme(s);
        }
        catch (const InvalidParameter& e)
        {
            fail("sweep.schemes", e.what());
        }
    }
    cfg.detectors.clear();
    for (const std::string& d : get_strings(at(doc, "sweep", "detectors"), "sweep.detectors"))
    {
        try
        {
            DetectorKind k = parse_detector(d);
            if (std::find(cfg.detectors.begin(), cfg.detectors.end(), k) == cfg.detectors.end())
                cfg.detectors.push_back(k);
        }
        catch (const InvalidParameter& e)
        {
            fail("sweep.detectors", e.what());
        }
    }
    cfg.n_s = get_int(at(doc, "sweep", "n_s"), "sweep.n_s", 1);
    cfg.n_rf = get_int(at(doc, "sweep", "n_rf"), "sweep.n_rf", 1);
    cfg.n_pil = get_int(at(doc, "sweep", "n_pil"), "sweep.n_pil", 0);
    cfg.n_channels = get_u64(at(doc, "sweep", "n_channels"), "sweep.n_channels");
    cfg.n_symbols = get_u64(at(doc, "sweep", "n_symbols"), "sweep.n_symbols");
    cfg.master_seed = get_u64(at(doc, "sweep", "master_seed"), "sweep.master_seed");
    cfg.min_bit_errors = get_u64(at(doc, "sweep", "min_bit_errors"), "sweep.min_bit_errors");
    cfg.block_size = get_u64(at(doc, "sweep", "block_size"), "sweep.block_size");

    cfg.altmin.tol = get_double(at(doc, "precoding", "tol"), "precoding.tol");
    cfg.altmin.max_iter =
        static_cast<int>(get_int(at(doc, "precoding", "max_iter"), "precoding.max_iter", 1));

    try
    {
        cfg.validate();
    }
    catch (const InvalidParameter& e)
    {
        throw ConfigError(e.what());
    }
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg)
{
    json regimes = json::array();
    json custom = json::array();
    for (const PnConfig& p : cfg.pn)
    {
        if (p.regime == PnRegime::Custom)
            custom.push_back(p.sigma2_psi());
        else
            regimes.push_back(to_string(p.regime));
    }
    json detectors = json::array();
    for (DetectorKind d : cfg.detectors)
        detectors.push_back(to_string(d));
    return json{
        {"experiment_id", cfg.experiment_id},
        {"kind", cfg.kind == SweepKind::Se ? "se" : "ber"},
        {"channel",
         {{"n_tx", cfg.channel.n_tx},
          {"n_rx", cfg.channel.n_rx},
          {"n_clusters", cfg.channel.n_clusters},
          {"n_rays", cfg.channel.n_rays},
          {"angular_spread_deg", cfg.channel.angular_spread_deg}}},
        {"pn", {{"regimes", regimes}, {"sigma2_psi", custom}}},
        {"sweep",
         {{"snr_db", cfg.snr_db},
          {"schemes", cfg.schemes},
          {"detectors", detectors},
          {"n_s", cfg.n_s},
          {"n_rf", cfg.n_rf},
          {"n_pil", cfg.n_pil},
          {"n_channels", cfg.n_channels},
          {"n_symbols", cfg.n_symbols},
          {"master_seed", cfg.master_seed},
          {"min_bit_errors", cfg.min_bit_errors},
          {"block_size", cfg.block_size}}},
        {"precoding", {{"tol", cfg.altmin.tol}, {"max_iter", cfg.altmin.max_iter}}},
    };
}

std::filesystem::path preset_dir()
{
    if (const char* env = std::getenv("HPGPN_PRESET_DIR"); env && *env)
        return env;
#ifdef HPGPN_PRESET_DIR
    return HPGPN_PRESET_DIR;
#else
    return "presets";
#endif
}

std::vector<std::string> list_presets()
{
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(preset_dir(), ec))
        if (entry.path().extension() == ".json")
            out.push_back(entry.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

std::filesystem::path find_preset(const std::string& name)
{
    std::filesystem::path p = preset_dir() / (name + ".json");
    if (!std::filesystem::exists(p))
        throw ConfigError("preset '" + name + "' not found in " + preset_dir().string());
    return p;
}

} // namespace hpgpn
