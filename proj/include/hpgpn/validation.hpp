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

#ifndef HPGPN_VALIDATION_HPP
#define HPGPN_VALIDATION_HPP

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hpgpn
{

struct CheckResult
{
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Deliberate defects for mutation smoke tests of the suite itself.
enum class InjectedFault
{
    None,
    PnSign // flips the sign of sigma2_psi in the analytic side of the characteristic-function check
};

struct ValidationOptions
{
    /// Channel realizations per Monte Carlo check (10^4 for the full acceptance run).
    std::uint64_t n_channels = 500;
    unsigned workers = 1;
    std::uint64_t seed = 20240611;
    InjectedFault fault = InjectedFault::None;
    /// Called after each check completes, e.g. to print a line.
    std::function<void(const CheckResult&)> on_result;
};

/// Module invariants: RNG, channel, precoding, phase noise, modulation, analytics, determinism.
std::vector<CheckResult> run_property_checks(const ValidationOptions& opts);
/// Monte Carlo acceptance criteria at the requested scale.
std::vector<CheckResult> run_acceptance_checks(const ValidationOptions& opts);

nlohmann::json validation_report(const std::vector<CheckResult>& results);

} // namespace hpgpn

#endif
