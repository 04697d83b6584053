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

#ifndef HPGPN_REPORT_HPP
#define HPGPN_REPORT_HPP

#include "hpgpn/modulation.hpp"
#include "hpgpn/montecarlo.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace hpgpn
{

enum class RowSource
{
    MonteCarlo,
    Analytic
};

/// Column order of every results CSV.
extern const std::vector<std::string> kResultColumns;

/// Shortest round-trip-safe text for a finite value, empty for NaN.
std::string format_number(double x);

/// Rows of one source. Curves other than plain BER are encoded as "<experiment_id>/<curve>".
void write_results_csv(std::ostream& os, const SweepResult& result, RowSource source);
std::string results_csv(const SweepResult& result, RowSource source);

/// Provenance sidecar: full config plus sweep diagnostics.
nlohmann::json sidecar_json(const SweepResult& result);

void write_constellation_csv(std::ostream& os, const Constellation& c);
void write_scatter_csv(std::ostream& os, const std::vector<ScatterSample>& samples);

} // namespace hpgpn

#endif
