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

#ifndef HPGPN_PHASENOISE_HPP
#define HPGPN_PHASENOISE_HPP

#include "hpgpn/common.hpp"
#include "hpgpn/precoding.hpp"
#include "hpgpn/rng.hpp"

#include <span>
#include <string>

namespace hpgpn
{

enum class PnRegime
{
    Off,
    Low,
    Medium,
    Strong,
    Custom
};

std::string to_string(PnRegime regime);
PnRegime parse_pn_regime(const std::string& name);

/// Gaussian phase-noise variances (rad^2) of the shared transmit and receive oscillators.
struct PnConfig
{
    double sigma2_tx = 0.0;
    double sigma2_rx = 0.0;
    PnRegime regime = PnRegime::Off;

    double sigma2_psi() const { return sigma2_tx + sigma2_rx; }

    /// strong / medium / low / off: total variance 1e-1 / 1e-2 / 1e-3 / 0, split evenly.
    static PnConfig from_regime(PnRegime regime);
    /// Even split of an arbitrary total variance; labelled with the matching regime if any.
    static PnConfig from_total(double sigma2_psi);
};

/// Per-symbol phases: psi = phi_tx + phi_rx, and the receive-side part alone.
struct PnTrace
{
    RVec psi;
    RVec phi_rx;
};

PnTrace sample_pn(const PnConfig& cfg, Index n_symbols, StreamRng& rng);

/// Stream-domain received vector for symbol slot k under a common LO:
///   r = e^{j psi[k]} rho U_BB^H W_RF^H H F_RF F_BB s + e^{j phi_rx[k]} U_BB^H W_RF^H n.
CVec apply_clo(const CVec& s, const PrecoderSet& pset, const CMat& h, const CVec& noise,
               const PnTrace& trace, Index k);

/// Precomputed per-realization link used by the sweeps. Produces the same distribution as
/// apply_clo without drawing the n_rx-dimensional antenna noise: the combined noise
/// U_BB^H W_RF^H n ~ CN(0, sigma2 C^H C), C = W_RF U_BB, is drawn as sqrt(sigma2) L w with
/// L L^H = C^H C and w ~ CN(0, I).
class StreamLink
{
  public:
    StreamLink(const PrecoderSet& pset, const CMat& h);

    Index n_s() const { return gain_.rows(); }
    const CMat& gain() const { return gain_; }
    const CMat& noise_factor() const { return noise_factor_; }

    /// Writes r for one symbol slot. `out` must have n_s entries.
    void receive(const CVec& s, double psi, double phi_rx, double sigma2, StreamRng& rng,
                 CVec& out) const;

  private:
    CMat gain_;
    CMat noise_factor_;
    mutable CVec w_;
};

/// psi_hat = arg( (1/N_pil) sum_q r_q s_q^* / (rho V_qq |s_q|^2) ) over the pilot streams.
double estimate_pn(std::span<const Index> pilot_streams, const CVec& r, const CVec& pilots,
                   const PrecoderSet& pset);

/// r_tilde = e^{-j psi_hat} r.
CVec compensate(const CVec& r, double psi_hat);

} // namespace hpgpn

#endif
