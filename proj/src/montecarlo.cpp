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

#include "hpgpn/montecarlo.hpp"

#include "hpgpn/analytics.hpp"
#include "hpgpn/modulation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace hpgpn
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Smallest used singular value relative to the largest below which a realization is redrawn.
constexpr double kUsableRatio = 1e-10;

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn)
{
    if (workers <= 1 || n <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;)
        {
            std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try
            {
                fn(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(n);
            }
        }
    };
    const std::size_t n_threads = std::min<std::size_t>(workers, n);
    std::vector<std::thread> pool;
    pool.reserve(n_threads - 1);
    for (std::size_t t = 1; t < n_threads; ++t)
        pool.emplace_back(body);
    body();
    for (std::thread& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

bool compensated(const ExperimentConfig& cfg) { return cfg.n_pil > 0; }

analytics::AnalyticInputs base_inputs(const ExperimentConfig& cfg, const PreparedChannel& pc)
{
    analytics::AnalyticInputs in;
    in.v_diag = pc.design.pset.v_diag;
    in.rho = pc.design.pset.rho;
    in.xi = pc.xi;
    in.omega = pc.omega;
    in.n_s = cfg.n_s;
    in.n_pil = cfg.n_pil;
    return in;
}

// Expression matched to the scheme and compensation mode; NaN where none applies.
double analytic_ber(const Constellation& c, analytics::AnalyticInputs in)
{
    in.m = c.order();
    if (in.n_pil > 0)
        in.sigma2_psi = 0.0;
    if (c.kind() == ModKind::Pqam)
    {
        in.gamma = c.gamma();
        return analytics::ber_pqam_pn(in);
    }
    if (in.sigma2_psi == 0.0)
        return analytics::ber_no_pn_qam(in);
    if (in.m == 16)
        return analytics::ber_16qam_pn(in);
    if (in.m == 4)
    {
        in.gamma = 1;
        return analytics::ber_pqam_pn(in);
    }
    return kNaN;
}

double floor_ber(const Constellation& c, double sigma2_psi, bool comp)
{
    if (comp || !(sigma2_psi > 0.0))
        return kNaN;
    if (c.kind() == ModKind::Pqam)
        return analytics::ber_pqam_floor(sigma2_psi, c.order(), c.gamma());
    if (c.order() == 16)
        return analytics::ber_16qam_floor(sigma2_psi);
    if (c.order() == 4)
        return analytics::ber_4qam_floor(sigma2_psi);
    return kNaN;
}

// Whether the analytic value is expected to track Monte Carlo for this detector.
bool analytic_applies(const Constellation& c, DetectorKind det, double sigma2_psi, bool comp)
{
    if (comp || sigma2_psi == 0.0)
        return c.kind() == ModKind::Qam || det == DetectorKind::Polar;
    if (c.kind() == ModKind::Qam && c.order() == 4)
        return true;
    return det == DetectorKind::Polar;
}

struct BerOutcome
{
    std::vector<std::uint64_t> bit_errors; // [grid][detector]
    std::vector<std::uint64_t> symbol_errors;
    std::vector<std::uint64_t> bits; // [grid]
    std::vector<double> analytic;    // [grid]
    std::vector<char> used;          // [grid]
    std::uint32_t attempts = 1;
    bool altmin_converged = true;
};

BerOutcome simulate_ber(const ExperimentConfig& cfg, const std::vector<Constellation>& cons,
                        std::uint64_t r, const std::vector<char>& active)
{
    const std::size_t n_pn = cfg.pn.size();
    const std::size_t n_sch = cons.size();
    const std::size_t n_snr = cfg.snr_db.size();
    const std::size_t n_det = cfg.detectors.size();
    const std::size_t n_grid = n_pn * n_sch * n_snr;

    BerOutcome out;
    out.bit_errors.assign(n_grid * n_det, 0);
    out.symbol_errors.assign(n_grid * n_det, 0);
    out.bits.assign(n_grid, 0);
    out.analytic.assign(n_grid, 0.0);
    out.used.assign(n_grid, 0);

    PreparedChannel pc = prepare_channel(cfg, r);
    out.attempts = pc.attempts;
    out.altmin_converged = pc.design.tx.converged && pc.design.rx.converged;
    const PrecoderSet& ps = pc.design.pset;
    const StreamLink link(ps, pc.channel.h);
    const bool comp = compensated(cfg);
    const Index n_s = cfg.n_s;

    std::vector<Index> pilot_streams(static_cast<std::size_t>(cfg.n_pil));
    for (Index q = 0; q < cfg.n_pil; ++q)
        pilot_streams[static_cast<std::size_t>(q)] = q;
    const CVec pilots = CVec::Ones(cfg.n_pil);

    const analytics::AnalyticInputs base = base_inputs(cfg, pc);
    CVec s(n_s);
    CVec rx(n_s);
    std::vector<int> tx(static_cast<std::size_t>(n_s), 0);
    std::vector<DetectorConfig> dcfg(n_det * static_cast<std::size_t>(n_s));

    for (std::size_t ip = 0; ip < n_pn; ++ip)
        for (std::size_t is = 0; is < n_sch; ++is)
            for (std::size_t il = 0; il < n_snr; ++il)
            {
                const std::uint32_t g = ber_grid_index(cfg, ip, is, il);
                if (!active[g])
                    continue;
                const Constellation& c = cons[is];
                const PnConfig& pn = cfg.pn[ip];
                const double snr = db_to_linear(cfg.snr_db[il]);
                const double sigma2 = noise_variance_for_rx_snr(ps.rho, pc.omega, snr);

                analytics::AnalyticInputs in = base;
                in.sigma2 = sigma2;
                in.snr_rx = snr;
                in.sigma2_psi = pn.sigma2_psi();
                const RVec beta = in.beta();

                // After compensation the residual phase error is left out of the polar metric.
                const double metric_psi = comp ? 0.0 : pn.sigma2_psi();
                for (std::size_t d = 0; d < n_det; ++d)
                    for (Index k = 0; k < n_s; ++k)
                        dcfg[d * n_s + k] = cfg.detectors[d] == DetectorKind::Polar
                                                ? DetectorConfig::polar(metric_psi, beta(k))
                                                : DetectorConfig::euclidean();

                StreamRng rng = derive_stream_rng(cfg.master_seed, r, g);
                const PnTrace trace = sample_pn(pn, static_cast<Index>(cfg.n_symbols), rng);
                const auto order = static_cast<std::uint32_t>(c.order());
                std::uint64_t* bit_err = &out.bit_errors[g * n_det];
                std::uint64_t* sym_err = &out.symbol_errors[g * n_det];

                for (std::uint64_t t = 0; t < cfg.n_symbols; ++t)
                {
                    for (Index k = 0; k < n_s; ++k)
                    {
                        if (k < cfg.n_pil)
                        {
                            s(k) = pilots(k);
                            continue;
                        }
                        tx[k] = static_cast<int>(rng.below(order));
                        s(k) = c.symbol(tx[k]);
                    }
                    const auto ti = static_cast<Index>(t);
                    link.receive(s, trace.psi(ti), trace.phi_rx(ti), sigma2, rng, rx);
                    if (comp)
                        rx = compensate(rx, estimate_pn(pilot_streams, rx, pilots, ps));
                    for (Index k = cfg.n_pil; k < n_s; ++k)
                    {
                        const cd rt = normalize_stream(rx(k), ps.rho, ps.v_diag(k));
                        for (std::size_t d = 0; d < n_det; ++d)
                        {
                            const int got = detect(rt, c, dcfg[d * n_s + k]);
                            const auto diff = static_cast<std::uint32_t>(got ^ tx[k]);
                            bit_err[d] += static_cast<std::uint64_t>(std::popcount(diff));
                            sym_err[d] += diff != 0;
                        }
                    }
                }
                out.bits[g] = cfg.n_symbols * static_cast<std::uint64_t>(n_s - cfg.n_pil) *
                              static_cast<std::uint64_t>(c.bits_per_symbol());
                out.analytic[g] = analytic_ber(c, in);
                out.used[g] = 1;
            }
    return out;
}

struct SeOutcome
{
    std::vector<double> no_pn;  // [snr]
    std::vector<double> fdp;    // [snr], evaluated at the same receive-antenna SNR
    std::vector<double> fdp_same_noise; // [snr], same thermal noise variance as the hybrid link
    std::vector<double> pilot;  // [snr]
    std::vector<double> bound;  // [pn][snr]
    std::uint64_t hp_above_fdp = 0;
    std::uint64_t hp_above_fdp_same_noise = 0;
    double pn0_gap = 0.0;
    std::uint32_t attempts = 1;
    bool altmin_converged = true;
};

SeOutcome simulate_se(const ExperimentConfig& cfg, const PreparedChannel& pc)
{
    const std::size_t n_snr = cfg.snr_db.size();
    SeOutcome out;
    out.no_pn.resize(n_snr);
    out.fdp.resize(n_snr);
    out.fdp_same_noise.resize(n_snr);
    out.pilot.resize(n_snr);
    out.bound.resize(cfg.pn.size() * n_snr);

    out.attempts = pc.attempts;
    out.altmin_converged = pc.design.tx.converged && pc.design.rx.converged;
    const analytics::AnalyticInputs base = base_inputs(cfg, pc);
    const RVec sv2 = pc.design.fdp.singular_values.array().square();
    // Receive power per antenna of the fully digital link, ||H F_opt||_F^2 / N_r.
    const double omega_fdp = sv2.sum() / static_cast<double>(pc.channel.h.rows());

    for (std::size_t il = 0; il < n_snr; ++il)
    {
        const double snr = db_to_linear(cfg.snr_db[il]);
        analytics::AnalyticInputs in = base;
        in.snr_rx = snr;
        in.sigma2 = noise_variance_for_rx_snr(in.rho, in.omega, snr);
        const double hp = analytics::se_no_pn(in);
        const double fdp = analytics::se_no_pn(RVec(sv2 * (snr / omega_fdp)));
        const double fdp_same = analytics::se_no_pn(RVec(sv2 / in.sigma2));
        out.no_pn[il] = hp;
        out.fdp[il] = fdp;
        out.fdp_same_noise[il] = fdp_same;
        out.pilot[il] = analytics::se_pilot(in);
        out.hp_above_fdp += hp > fdp * (1.0 + 1e-12);
        out.hp_above_fdp_same_noise += hp > fdp_same * (1.0 + 1e-12);
        for (std::size_t ip = 0; ip < cfg.pn.size(); ++ip)
        {
            in.sigma2_psi = cfg.pn[ip].sigma2_psi();
            const double bound = analytics::se_pn_lower_bound(in);
            out.bound[ip * n_snr + il] = bound;
            if (in.sigma2_psi == 0.0)
                out.pn0_gap = std::max(out.pn0_gap, std::abs(bound - hp) / hp);
        }
    }
    return out;
}

template <typename Outcome, typename Simulate, typename Reduce, typename Stop>
void run_blocks(const ExperimentConfig& cfg, unsigned workers, const ProgressFn& progress,
                Simulate&& simulate, Reduce&& reduce, Stop&& all_stopped)
{
    const std::uint64_t block = std::max<std::uint64_t>(cfg.block_size, 1);
    for (std::uint64_t start = 0; start < cfg.n_channels; start += block)
    {
        const std::uint64_t n = std::min(block, cfg.n_channels - start);
        std::vector<Outcome> outcomes(n);
        parallel_for(n, workers, [&](std::size_t i) { outcomes[i] = simulate(start + i); });
        for (const Outcome& o : outcomes)
            reduce(o);
        if (progress)
            progress(start + n, cfg.n_channels);
        if (all_stopped())
            break;
    }
}

} // namespace

void ExperimentConfig::validate() const
{
    channel.validate();
    if (n_s < 1)
        throw InvalidParameter("sweep.n_s must be >= 1");
    if (n_rf < n_s)
        throw InvalidParameter("sweep.n_rf must be >= sweep.n_s");
    if (n_rf > std::min(channel.n_tx, channel.n_rx))
        throw InvalidParameter("sweep.n_rf must not exceed the antenna counts");
    if (n_pil < 0 || n_pil >= n_s)
        throw InvalidParameter("sweep.n_pil must be in [0, n_s)");
    if (snr_db.empty())
        throw InvalidParameter("sweep.snr_db must not be empty");
    for (double x : snr_db)
        if (!std::isfinite(x))
            throw InvalidParameter("sweep.snr_db entries must be finite");
    if (pn.empty())
        throw InvalidParameter("pn must list at least one phase-noise level");
    for (const PnConfig& p : pn)
        if (!(p.sigma2_tx >= 0.0) || !(p.sigma2_rx >= 0.0) || !std::isfinite(p.sigma2_psi()))
            throw InvalidParameter("pn variances must be finite and >= 0");
    if (n_channels < 1)
        throw InvalidParameter("sweep.n_channels must be >= 1");
    if (n_symbols < 1)
        throw InvalidParameter("sweep.n_symbols must be >= 1");
    if (block_size < 1)
        throw InvalidParameter("sweep.block_size must be >= 1");
    if (!(altmin.tol > 0.0) || altmin.max_iter < 1)
        throw InvalidParameter("precoding.tol must be positive and precoding.max_iter >= 1");
    if (kind == SweepKind::Ber)
    {
        if (schemes.empty())
            throw InvalidParameter("sweep.schemes must not be empty");
        for (const std::string& s : schemes)
            parse_scheme(s);
        if (detectors.empty())
            throw InvalidParameter("sweep.detectors must not be empty");
        const double grid = static_cast<double>(pn.size()) * static_cast<double>(schemes.size()) *
                            static_cast<double>(snr_db.size());
        if (grid >= static_cast<double>(kScatterStream))
            throw InvalidParameter("sweep grid is too large");
    }
}

PreparedChannel prepare_channel(const ExperimentConfig& cfg, std::uint64_t realization)
{
    ChannelParams params = cfg.channel;
    params.seed = cfg.master_seed;
    for (std::uint32_t a = 0; a < kMaxChannelAttempts; ++a)
    {
        StreamRng rng = derive_stream_rng(cfg.master_seed, realization, kChannelStream - a);
        PreparedChannel pc;
        pc.attempts = a + 1;
        pc.channel = generate_channel(params, rng);
        try
        {
            pc.design = design_hybrid(pc.channel.h, cfg.n_s, cfg.n_rf, cfg.altmin);
        }
        catch (const DegenerateError&)
        {
            continue;
        }
        const RVec& v = pc.design.pset.v_diag;
        if (!v.allFinite() || !(v(cfg.n_s - 1) > kUsableRatio * v(0)))
            continue;
        pc.xi = noise_shaping(pc.design.pset);
        pc.omega = rx_power_factor(pc.channel.h, pc.design.pset.f_rf);
        if (!(pc.xi.array() > 0.0).all() || !(pc.omega > 0.0))
            continue;
        return pc;
    }
    throw DegenerateError(fmt::format("realization {}: no usable channel in {} draws", realization,
                                      kMaxChannelAttempts));
}

std::uint32_t ber_grid_index(const ExperimentConfig& cfg, std::size_t pn, std::size_t scheme,
                             std::size_t snr)
{
    return static_cast<std::uint32_t>((pn * cfg.schemes.size() + scheme) * cfg.snr_db.size() + snr);
}

double binomial_ci95(std::uint64_t errors, std::uint64_t trials)
{
    if (trials == 0)
        return kNaN;
    const double p = static_cast<double>(errors) / static_cast<double>(trials);
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

SweepResult run_ber_sweep(const ExperimentConfig& cfg, unsigned workers, const ProgressFn& progress)
{
    cfg.validate();
    std::vector<Constellation> cons;
    for (const std::string& s : cfg.schemes)
        cons.push_back(parse_scheme(s));

    const std::size_t n_snr = cfg.snr_db.size();
    const std::size_t n_det = cfg.detectors.size();
    const std::size_t n_grid = cfg.pn.size() * cons.size() * n_snr;

    std::vector<std::uint64_t> bit_errors(n_grid * n_det, 0), symbol_errors(n_grid * n_det, 0);
    std::vector<std::uint64_t> bits(n_grid, 0), channels(n_grid, 0);
    std::vector<double> analytic_sum(n_grid, 0.0);
    std::vector<char> active(n_grid, 1);

    SweepResult res;
    res.config = cfg;

    run_blocks<BerOutcome>(
        cfg, workers, progress,
        [&](std::uint64_t r) { return simulate_ber(cfg, cons, r, active); },
        [&](const BerOutcome& o) {
            res.channels_resampled += o.attempts - 1;
            res.altmin_not_converged += !o.altmin_converged;
            for (std::size_t g = 0; g < n_grid; ++g)
            {
                if (!o.used[g])
                    continue;
                for (std::size_t d = 0; d < n_det; ++d)
                {
                    bit_errors[g * n_det + d] += o.bit_errors[g * n_det + d];
                    symbol_errors[g * n_det + d] += o.symbol_errors[g * n_det + d];
                }
                bits[g] += o.bits[g];
                analytic_sum[g] += o.analytic[g];
                ++channels[g];
            }
        },
        [&] {
            if (cfg.min_bit_errors == 0)
                return false;
            bool any = false;
            for (std::size_t g = 0; g < n_grid; ++g)
            {
                std::uint64_t least = bit_errors[g * n_det];
                for (std::size_t d = 1; d < n_det; ++d)
                    least = std::min(least, bit_errors[g * n_det + d]);
                if (least >= cfg.min_bit_errors)
                    active[g] = 0;
                any = any || active[g];
            }
            return !any;
        });

    const bool comp = compensated(cfg);
    for (std::size_t ip = 0; ip < cfg.pn.size(); ++ip)
        for (std::size_t is = 0; is < cons.size(); ++is)
            for (std::size_t il = 0; il < n_snr; ++il)
            {
                const std::uint32_t g = ber_grid_index(cfg, ip, is, il);
                const double s2 = cfg.pn[ip].sigma2_psi();
                const double analytic =
                    channels[g] > 0 ? analytic_sum[g] / static_cast<double>(channels[g]) : kNaN;
                for (std::size_t d = 0; d < n_det; ++d)
                {
                    GridPoint p;
                    p.curve = "ber";
                    p.snr_db = cfg.snr_db[il];
                    p.sigma2_psi = s2;
                    p.modulation = cons[is].name();
                    p.shape_gamma = cons[is].kind() == ModKind::Pqam ? cons[is].gamma() : 0;
                    p.detector = to_string(cfg.detectors[d]);
                    p.grid_index = g;
                    p.bit_errors = bit_errors[g * n_det + d];
                    p.symbol_errors = symbol_errors[g * n_det + d];
                    p.bits_sent = bits[g];
                    p.n_channels = channels[g];
                    p.ber = bits[g] > 0 ? static_cast<double>(p.bit_errors) / static_cast<double>(bits[g])
                                        : kNaN;
                    p.ci95 = binomial_ci95(p.bit_errors, bits[g]);
                    p.ber_analytic = analytic;
                    p.ber_floor = floor_ber(cons[is], s2, comp);
                    p.se_mc = kNaN;
                    p.se_analytic = kNaN;

                    if (p.bit_errors >= 200 && std::isfinite(analytic) &&
                        analytic_applies(cons[is], cfg.detectors[d], s2, comp))
                    {
                        const double half = 2.576 * std::sqrt(p.ber * (1.0 - p.ber) /
                                                              static_cast<double>(bits[g]));
                        if (std::abs(analytic - p.ber) > half)
                            res.deviations.push_back(fmt::format(
                                "{} {} sigma2_psi={} snr_db={}: montecarlo {:.4e} vs analytic {:.4e}",
                                p.modulation, p.detector, s2, p.snr_db, p.ber, analytic));
                    }
                    res.points.push_back(std::move(p));
                }
            }
    return res;
}

namespace
{

class SeAccumulator
{
  public:
    explicit SeAccumulator(const ExperimentConfig& cfg)
        : cfg_(cfg), no_pn_(cfg.snr_db.size(), 0.0), fdp_(cfg.snr_db.size(), 0.0),
          fdp_same_(cfg.snr_db.size(), 0.0), pilot_(cfg.snr_db.size(), 0.0),
          bound_(cfg.pn.size() * cfg.snr_db.size(), 0.0)
    {
    }

    void add(const SeOutcome& o, SweepResult& res)
    {
        res.channels_resampled += o.attempts - 1;
        res.altmin_not_converged += !o.altmin_converged;
        res.hp_above_fdp += o.hp_above_fdp;
        res.hp_above_fdp_same_noise += o.hp_above_fdp_same_noise;
        res.max_pn0_gap = std::max(res.max_pn0_gap, o.pn0_gap);
        for (std::size_t i = 0; i < no_pn_.size(); ++i)
        {
            no_pn_[i] += o.no_pn[i];
            fdp_[i] += o.fdp[i];
            fdp_same_[i] += o.fdp_same_noise[i];
            pilot_[i] += o.pilot[i];
        }
        for (std::size_t i = 0; i < bound_.size(); ++i)
            bound_[i] += o.bound[i];
        ++used_;
    }

    void emit(SweepResult& res) const
    {
        const std::size_t n_snr = cfg_.snr_db.size();
        const double n = static_cast<double>(used_);
        auto point = [&](const char* curve, std::size_t il, double se) {
            GridPoint p;
            p.curve = curve;
            p.snr_db = cfg_.snr_db[il];
            p.has_pn = false;
            p.sigma2_psi = 0.0;
            p.n_channels = used_;
            p.ber = p.ci95 = p.ber_analytic = p.ber_floor = kNaN;
            p.se_mc = se / n;
            p.se_analytic = kNaN;
            return p;
        };
        for (std::size_t il = 0; il < n_snr; ++il)
            res.points.push_back(point("hp_no_pn", il, no_pn_[il]));
        for (std::size_t il = 0; il < n_snr; ++il)
            res.points.push_back(point("fdp", il, fdp_[il]));
        for (std::size_t il = 0; il < n_snr; ++il)
            res.points.push_back(point("fdp_same_noise", il, fdp_same_[il]));
        for (std::size_t ip = 0; ip < cfg_.pn.size(); ++ip)
            for (std::size_t il = 0; il < n_snr; ++il)
            {
                GridPoint p = point("hp_pn_bound", il, bound_[ip * n_snr + il]);
                p.has_pn = true;
                p.sigma2_psi = cfg_.pn[ip].sigma2_psi();
                if (p.sigma2_psi > 0.0)
                    p.se_analytic = analytics::se_pn_high_snr(p.sigma2_psi, cfg_.n_s);
                res.points.push_back(std::move(p));
            }
        if (cfg_.n_pil > 0)
            for (std::size_t il = 0; il < n_snr; ++il)
                res.points.push_back(point("hp_pilot", il, pilot_[il]));
    }

  private:
    const ExperimentConfig& cfg_;
    std::vector<double> no_pn_, fdp_, fdp_same_, pilot_, bound_;
    std::uint64_t used_ = 0;
};

} // namespace

SweepResult run_se_sweep(const ExperimentConfig& cfg, unsigned workers, const ProgressFn& progress)
{
    cfg.validate();
    SweepResult res;
    res.config = cfg;
    SeAccumulator acc(cfg);
    run_blocks<SeOutcome>(
        cfg, workers, progress,
        [&](std::uint64_t r) { return simulate_se(cfg, prepare_channel(cfg, r)); },
        [&](const SeOutcome& o) { acc.add(o, res); }, [] { return false; });
    acc.emit(res);
    return res;
}

PreparedChannel prepare_from_record(const ExperimentConfig& cfg, const ChannelRecord& rec)
{
    PreparedChannel pc;
    pc.channel.h = rec.h;
    if (rec.precoders && rec.precoders->n_s() == cfg.n_s && rec.precoders->n_rf() == cfg.n_rf)
    {
        pc.design.pset = *rec.precoders;
        pc.design.fdp = optimal_fdp(rec.h, cfg.n_s);
        pc.design.tx.converged = pc.design.rx.converged = true;
    }
    else
        pc.design = design_hybrid(rec.h, cfg.n_s, cfg.n_rf, cfg.altmin);
    const RVec& v = pc.design.pset.v_diag;
    if (!v.allFinite() || !(v(cfg.n_s - 1) > kUsableRatio * v(0)))
        throw DegenerateError(fmt::format("record {}: smallest used singular value underflows",
                                          rec.realization));
    pc.xi = noise_shaping(pc.design.pset);
    pc.omega = rx_power_factor(pc.channel.h, pc.design.pset.f_rf);
    return pc;
}

SweepResult evaluate_analytic(const ExperimentConfig& cfg, const std::vector<ChannelRecord>& records)
{
    cfg.validate();
    if (records.empty())
        throw InvalidParameter("evaluate_analytic: no channel records");
    for (const ChannelRecord& rec : records)
        if (rec.h.rows() != cfg.channel.n_rx || rec.h.cols() != cfg.channel.n_tx)
            throw InvalidParameter("evaluate_analytic: record dimensions differ from the config");

    SweepResult res;
    res.config = cfg;
    res.analytic_only = true;
    if (cfg.kind == SweepKind::Se)
    {
        SeAccumulator acc(cfg);
        for (const ChannelRecord& rec : records)
            acc.add(simulate_se(cfg, prepare_from_record(cfg, rec)), res);
        acc.emit(res);
        return res;
    }

    std::vector<Constellation> cons;
    for (const std::string& s : cfg.schemes)
        cons.push_back(parse_scheme(s));
    const std::size_t n_snr = cfg.snr_db.size();
    std::vector<double> sum(cfg.pn.size() * cons.size() * n_snr, 0.0);
    for (const ChannelRecord& rec : records)
    {
        const PreparedChannel pc = prepare_from_record(cfg, rec);
        const analytics::AnalyticInputs base = base_inputs(cfg, pc);
        for (std::size_t ip = 0; ip < cfg.pn.size(); ++ip)
            for (std::size_t is = 0; is < cons.size(); ++is)
                for (std::size_t il = 0; il < n_snr; ++il)
                {
                    analytics::AnalyticInputs in = base;
                    in.snr_rx = db_to_linear(cfg.snr_db[il]);
                    in.sigma2 = noise_variance_for_rx_snr(in.rho, in.omega, in.snr_rx);
                    in.sigma2_psi = cfg.pn[ip].sigma2_psi();
                    sum[ber_grid_index(cfg, ip, is, il)] += analytic_ber(cons[is], in);
                }
    }
    for (std::size_t ip = 0; ip < cfg.pn.size(); ++ip)
        for (std::size_t is = 0; is < cons.size(); ++is)
            for (std::size_t il = 0; il < n_snr; ++il)
            {
                const std::uint32_t g = ber_grid_index(cfg, ip, is, il);
                GridPoint p;
                p.curve = "ber";
                p.snr_db = cfg.snr_db[il];
                p.sigma2_psi = cfg.pn[ip].sigma2_psi();
                p.modulation = cons[is].name();
                p.shape_gamma = cons[is].kind() == ModKind::Pqam ? cons[is].gamma() : 0;
                p.grid_index = g;
                p.n_channels = records.size();
                p.ber = p.ci95 = p.se_mc = p.se_analytic = kNaN;
                p.ber_analytic = sum[g] / static_cast<double>(records.size());
                p.ber_floor = floor_ber(cons[is], p.sigma2_psi, compensated(cfg));
                res.points.push_back(std::move(p));
            }
    return res;
}

SweepResult run_sweep(const ExperimentConfig& cfg, unsigned workers, const ProgressFn& progress)
{
    return cfg.kind == SweepKind::Se ? run_se_sweep(cfg, workers, progress)
                                     : run_ber_sweep(cfg, workers, progress);
}

std::vector<ScatterSample> received_scatter(const ExperimentConfig& cfg, const std::string& scheme,
                                            double snr_db, const PnConfig& pn,
                                            std::uint64_t n_symbols)
{
    const Constellation c = parse_scheme(scheme);
    const PreparedChannel pc = prepare_channel(cfg, 0);
    const PrecoderSet& ps = pc.design.pset;
    const StreamLink link(ps, pc.channel.h);
    const double sigma2 = noise_variance_for_rx_snr(ps.rho, pc.omega, db_to_linear(snr_db));

    StreamRng rng = derive_stream_rng(cfg.master_seed, 0, kScatterStream);
    const Index n_s = ps.n_s();
    const auto n_slots = static_cast<Index>((n_symbols + n_s - 1) / n_s);
    const PnTrace trace = sample_pn(pn, n_slots, rng);
    CVec s(n_s), rx(n_s);
    std::vector<int> tx(static_cast<std::size_t>(n_s));
    std::vector<ScatterSample> out;
    out.reserve(n_symbols);
    for (Index t = 0; t < n_slots; ++t)
    {
        for (Index k = 0; k < n_s; ++k)
        {
            tx[k] = static_cast<int>(rng.below(static_cast<std::uint32_t>(c.order())));
            s(k) = c.symbol(tx[k]);
        }
        link.receive(s, trace.psi(t), trace.phi_rx(t), sigma2, rng, rx);
        for (Index k = 0; k < n_s && out.size() < n_symbols; ++k)
            out.push_back({out.size(), k, tx[k], normalize_stream(rx(k), ps.rho, ps.v_diag(k))});
    }
    return out;
}

} // namespace hpgpn
