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

#ifndef HPGPN_PRECODING_HPP
#define HPGPN_PRECODING_HPP

#include "hpgpn/common.hpp"

#include <vector>

namespace hpgpn
{

/// Fully-digital reference: leading singular vectors of H.
struct FdpPair
{
    CMat f_opt; // n_tx x n_s
    CMat w_opt; // n_rx x n_s
    RVec singular_values; // leading n_s singular values of H
};

FdpPair optimal_fdp(const CMat& h, Index n_s);

struct AltMinOptions
{
    double tol = 1e-6;
    int max_iter = 100;
};

struct AltMinResult
{
    CMat f_rf; // unit-modulus, n x n_rf
    CMat f_bb; // n_rf x n_s
    std::vector<double> objective; // ||F_opt - F_RF F_BB||_F after each digital update
    bool converged = false;
};

/// Phase-extraction alternating minimization of ||F_opt - F_RF F_BB||_F.
///
/// F_BB starts as the identity-padded semi-unitary matrix. Each iteration fits F_BB as a scaled
/// orthogonal-Procrustes solution for the current F_RF, then re-extracts the phases of
/// F_opt F_BB^H for F_RF. The recorded objective never increases: an iterate that would raise it
/// ends the loop and the previous pair is returned. Running out of iterations is reported through
/// `converged`, not an exception.
AltMinResult pe_altmin(const CMat& f_opt, Index n_rf, const AltMinOptions& options = {});

/// Unit-modulus projection, entry-wise exp(j arg(x)); zero maps to 1.
CMat extract_phases(const CMat& x);

/// H_eq = W_RF^H H F_RF.
template <typename DH, typename DF, typename DW>
CMat equivalent_channel(const Eigen::MatrixBase<DH>& h, const Eigen::MatrixBase<DF>& f_rf,
                        const Eigen::MatrixBase<DW>& w_rf)
{
    if (h.cols() != f_rf.rows() || h.rows() != w_rf.rows())
        throw InvalidParameter("equivalent_channel: dimension mismatch");
    return w_rf.adjoint() * h * f_rf;
}

struct DigitalStage
{
    CMat u_bb;     // left singular vectors of H_eq
    RVec v_diag;   // singular values, non-increasing
    CMat f_bb_raw; // right singular vectors of H_eq
};

/// SVD of the equivalent channel: H_eq = U_BB diag(v) F_BB^H.
DigitalStage digital_from_svd(const CMat& h_eq);

/// rho = sqrt(n_s) / ||F_RF F_BB||_F.
double normalize_rho(const CMat& f_rf, const CMat& f_bb, Index n_s);

struct PrecoderSet
{
    CMat f_rf; // n_tx x n_rf, |entries| = 1
    CMat f_bb; // n_rf x n_s
    CMat w_rf; // n_rx x n_rf, |entries| = 1
    CMat u_bb; // n_rf x n_s
    RVec v_diag;
    double rho = 1.0;

    Index n_s() const { return f_bb.cols(); }
    Index n_rf() const { return f_rf.cols(); }
};

struct HybridDesign
{
    PrecoderSet pset;
    FdpPair fdp;
    AltMinResult tx;
    AltMinResult rx;
};

/// FDP reference, PE-AltMin on both ends, then the digital stage from the SVD of H_eq.
HybridDesign design_hybrid(const CMat& h, Index n_s, Index n_rf, const AltMinOptions& options = {});

struct StreamMetrics
{
    RVec beta;    // post-combining per-stream SNR
    RVec xi;      // u_k^H W_RF^H W_RF u_k
    double omega; // mean_q |h_q^T F_RF F_RF^H h_q^*|
};

RVec noise_shaping(const PrecoderSet& pset);
double rx_power_factor(const CMat& h, const CMat& f_rf);

/// Per-stream SNR from the thermal noise variance: beta_k = rho^2 |V_kk|^2 / (sigma2 xi_k).
StreamMetrics stream_metrics(const PrecoderSet& pset, const CMat& h, double sigma2);

/// Per-stream SNR from the SNR at the receive antennas: beta_k = |V_kk|^2 snr / (|xi_k| omega).
RVec beta_from_rx_snr(const RVec& v_diag, const RVec& xi, double omega, double snr_rx);

/// Thermal noise variance that realises `snr_rx` at the receive antennas: rho^2 omega / snr_rx.
double noise_variance_for_rx_snr(double rho, double omega, double snr_rx);

/// rho U_BB^H W_RF^H H F_RF F_BB; diagonal up to round-off.
CMat signal_matrix(const PrecoderSet& pset, const CMat& h);

/// max_{k != i} |u_k^H H_eq f_i| / |V_11|.
double isi_leakage(const PrecoderSet& pset, const CMat& h);

} // namespace hpgpn

#endif
