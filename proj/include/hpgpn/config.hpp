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

#ifndef HPGPN_CONFIG_HPP
#define HPGPN_CONFIG_HPP

#include "hpgpn/montecarlo.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hpgpn
{

/// Bad configuration input. what() names the offending field or line.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Complete document with every recognised key at its default value.
nlohmann::json default_config_json();

/// Parse config text; syntax errors report the line and column.
nlohmann::json parse_config_text(const std::string& text, const std::string& origin = "config");
nlohmann::json load_config_file(const std::filesystem::path& path);

/// Defaults overlaid with `doc`. Unknown keys are rejected.
nlohmann::json merge_with_defaults(const nlohmann::json& doc);

/// Apply "key=value". The key is a dotted path (sweep.n_s) or a leaf name that is unique in the
/// document (n_s). The value is read as JSON when it parses, as a comma list when it contains
/// commas, and as a plain string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// "a:step:b" (inclusive), a JSON list of numbers, or a single number.
std::vector<double> parse_snr_grid(const nlohmann::json& value);

/// Presets directory: $HPGPN_PRESET_DIR if set, else the one compiled in.
std::filesystem::path preset_dir();
std::vector<std::string> list_presets();
std::filesystem::path find_preset(const std::string& name);

} // namespace hpgpn

#endif
