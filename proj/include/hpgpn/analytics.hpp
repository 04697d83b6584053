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

#ifndef HPGPN_ANALYTICS_HPP
#define HPGPN_ANALYTICS_HPP

#include "hpgpn/common.hpp"

namespace hpgpn::analytics
{

/// Gaussian tail probability, 0.5 erfc(x / sqrt 2).
double qfunc(double x);

// ---- Achievable rate ----------------------------------------------------------------------

/// Channel-conditioned quantities every expression below draws from. Streams [0, n_pil) carry
/// pilots when n_pil > 0.
struct AnalyticInputs
{
    RVec v_diag;
    double rho = 1.0;
    RVec xi;
    double omega = 1.0;
    double sigma2 = 1.0; // thermal noise variance at the antennas
    double snr_rx = 1.0; // SNR at the receive antennas (linear)
    double sigma2_psi = 0.0;
    int m = 16;
    int gamma = 0;
    Index n_s = 0;
    Index n_pil = 0;

    /// beta_k from the noise variance.
    RVec beta() const;
    /// beta_k from the receive-antenna SNR; equal to beta() when sigma2 = rho^2 omega / snr_rx.
    RVec beta_rx() const;
};

double se_no_pn(const RVec& beta);
double se_no_pn(const AnalyticInputs& in);
/// Rate after pilot-based compensation: data streams only.
double se_pilot(const AnalyticInputs& in);
double se_pn_lower_bound(const AnalyticInputs& in);
/// High-SNR limit of the lower bound: n_s log2(e^s / (e^s - 1)).
double se_pn_high_snr(double sigma2_psi, Index n_s);

/// E{e^{j psi}} = e^{-sigma2_psi / 2}.
double pn_characteristic(double sigma2_psi);
/// |E{e^{j psi} V_kk}|^2 = e^{-sigma2_psi} |V_kk|^2.
double coherent_gain_sq(double v_kk, double sigma2_psi);
/// kappa_k = (1 - e^{-sigma2_psi}) |V_kk|^2.
double interference_power_kappa(double v_kk, double sigma2_psi);
/// E{|e^{j phi} u_k^H W_RF^H n|^2} = sigma2 xi_k.
double combined_noise_power(double sigma2, double xi_k);
/// Per-stream SINR of the lower bound assembled from the three terms above.
double pn_sinr(double rho, double v_kk, double xi_k, double sigma2, double sigma2_psi);

// ---- BER -----------------------------------------------------------------------------------

/// Exact square M-QAM Gray BER over AWGN, averaged over the given per-stream SNRs.
double ber_no_pn_qam(const RVec& beta, int m);
/// Same, over the data streams of `in`.
double ber_no_pn_qam(const AnalyticInputs& in);

/// Error terms of the 16-QAM polar decision regions for one stream.
struct Qam16LevelErrors
{
    double inner_outer; // P_e^(r,p): first and third amplitude levels, eight symbols
    double middle;      // P_e^(b): second amplitude level, eight symbols
    double symbol_error() const { return (inner_outer + middle) / 16.0; }
};

Qam16LevelErrors qam16_level_errors(double beta_k, double sigma2_psi);
/// Closed-form 16-QAM detection error probability at one stream.
double qam16_stream_error(double beta_k, double sigma2_psi);
/// Stream-averaged 16-QAM BER under Gaussian phase noise.
double ber_16qam_pn(const RVec& beta, double sigma2_psi);
double ber_16qam_pn(const AnalyticInputs& in);
double ber_16qam_floor(double sigma2_psi);

/// M-PQAM(gamma) BER for one stream in terms of the receive-antenna SNR.
double pqam_stream_ber(double v_kk, double xi_k, double omega, double snr_rx, double sigma2_psi,
                       int m, int gamma);
double ber_pqam_pn(const AnalyticInputs& in);
double ber_pqam_floor(double sigma2_psi, int m, int gamma);
double ber_4qam_floor(double sigma2_psi);

} // namespace hpgpn::analytics

#endif
