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

#ifndef HPGPN_MONTECARLO_HPP
#define HPGPN_MONTECARLO_HPP

#include "hpgpn/channel.hpp"
#include "hpgpn/channel_dump.hpp"
#include "hpgpn/detection.hpp"
#include "hpgpn/phasenoise.hpp"
#include "hpgpn/precoding.hpp"
#include "hpgpn/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hpgpn
{

enum class SweepKind
{
    Ber,
    Se
};

struct ExperimentConfig
{
    std::string experiment_id = "custom";
    SweepKind kind = SweepKind::Ber;
    ChannelParams channel;
    std::vector<PnConfig> pn{PnConfig::from_regime(PnRegime::Strong)};
    std::vector<double> snr_db;
    std::vector<std::string> schemes{"16-QAM"};
    std::vector<DetectorKind> detectors{DetectorKind::Euclidean};
    Index n_s = 4;
    Index n_rf = 4;
    Index n_pil = 0;
    std::uint64_t n_channels = 10000;
    std::uint64_t n_symbols = 100;
    std::uint64_t master_seed = 1;
    /// Stop a grid point once every detector has this many bit errors; 0 never stops early.
    std::uint64_t min_bit_errors = 200;
    /// Realizations per scheduling block. Early stopping is decided between blocks only, so
    /// results do not depend on the worker count.
    std::uint64_t block_size = 500;
    AltMinOptions altmin;

    void validate() const;
};

/// One output row of a sweep.
struct GridPoint
{
    std::string curve; // "ber"; SE: hp_no_pn, hp_pn_bound, hp_pilot, fdp, fdp_same_noise
    double snr_db = 0.0;
    double sigma2_psi = 0.0;
    bool has_pn = true; // false for curves that do not depend on the phase-noise level
    std::string modulation;
    int shape_gamma = 0;
    std::string detector = "none";
    std::uint32_t grid_index = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t symbol_errors = 0;
    std::uint64_t bits_sent = 0;
    std::uint64_t n_channels = 0;
    double ber = 0.0;
    double ci95 = 0.0;
    double ber_analytic = 0.0; // NaN where no expression applies
    double ber_floor = 0.0;    // NaN where no floor applies
    double se_mc = 0.0;        // NaN for BER rows
    double se_analytic = 0.0;  // closed-form high-SNR limit where defined, else NaN
};

struct SweepResult
{
    ExperimentConfig config;
    std::vector<GridPoint> points;
    std::uint64_t channels_resampled = 0;
    std::uint64_t altmin_not_converged = 0;
    /// (realization, SNR) pairs where the hybrid SE exceeds the fully digital SE, with the
    /// digital link taken at the same receive-antenna SNR and at the same noise variance.
    std::uint64_t hp_above_fdp = 0;
    std::uint64_t hp_above_fdp_same_noise = 0;
    /// Largest relative gap between the phase-noise bound at zero variance and the no-PN rate.
    double max_pn0_gap = 0.0;
    std::vector<std::string> deviations;
    /// Set when the result comes from analytic evaluation over supplied channels only.
    bool analytic_only = false;
};

/// Channel plus its hybrid design, resampled until the used singular values are usable.
struct PreparedChannel
{
    ChannelMatrix channel;
    HybridDesign design;
    RVec xi;
    double omega = 0.0;
    std::uint32_t attempts = 1;
};

PreparedChannel prepare_channel(const ExperimentConfig& cfg, std::uint64_t realization);
/// Uses the stored precoders when their dimensions match the config, else designs them.
PreparedChannel prepare_from_record(const ExperimentConfig& cfg, const ChannelRecord& rec);

/// Grid index of a BER point; detectors share it so they see the same random numbers.
std::uint32_t ber_grid_index(const ExperimentConfig& cfg, std::size_t pn, std::size_t scheme,
                             std::size_t snr);

using ProgressFn = std::function<void(std::uint64_t done, std::uint64_t total)>;

SweepResult run_ber_sweep(const ExperimentConfig& cfg, unsigned workers = 1,
                          const ProgressFn& progress = {});
SweepResult run_se_sweep(const ExperimentConfig& cfg, unsigned workers = 1,
                         const ProgressFn& progress = {});
SweepResult run_sweep(const ExperimentConfig& cfg, unsigned workers = 1,
                      const ProgressFn& progress = {});

/// Channel-conditioned analytic curves averaged over the given channels (no simulation).
SweepResult evaluate_analytic(const ExperimentConfig& cfg, const std::vector<ChannelRecord>& records);

/// 95% normal-approximation half-width of a binomial proportion.
double binomial_ci95(std::uint64_t errors, std::uint64_t trials);

struct ScatterSample
{
    std::uint64_t sample;
    Index stream;
    int tx_index;
    cd rx; // normalized received point
};

/// `n_symbols` received points for channel realization 0 of `cfg`, all streams in turn.
std::vector<ScatterSample> received_scatter(const ExperimentConfig& cfg, const std::string& scheme,
                                            double snr_db, const PnConfig& pn,
                                            std::uint64_t n_symbols);

} // namespace hpgpn

#endif
