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

#include "hpgpn/precoding.hpp"

#include <algorithm>
#include <cmath>

namespace hpgpn
{

FdpPair optimal_fdp(const CMat& h, Index n_s)
{
    if (n_s < 1 || n_s > std::min(h.rows(), h.cols()))
        throw InvalidParameter("optimal_fdp: stream count must be in [1, min(n_rx, n_tx)]");
    FdpPair out;
    // Leading modes from the eigendecomposition of the smaller Gram matrix. Squaring the
    // condition number only hurts the trailing modes, so fall back to BDCSVD if a used one is tiny.
    const bool wide = h.rows() <= h.cols();
    CMat gram = wide ? CMat(h * h.adjoint()) : CMat(h.adjoint() * h);
    Eigen::SelfAdjointEigenSolver<CMat> es(gram);
    RVec lambda = es.eigenvalues().reverse().head(n_s);
    if (es.info() == Eigen::Success && lambda(n_s - 1) > 1e-16 * lambda(0) && lambda(0) > 0.0)
    {
        out.singular_values = lambda.cwiseSqrt();
        CMat basis = es.eigenvectors().rightCols(n_s).rowwise().reverse();
        CMat other = wide ? CMat(h.adjoint() * basis) : CMat(h * basis);
        for (Index k = 0; k < n_s; ++k)
            other.col(k) /= out.singular_values(k);
        out.w_opt = wide ? basis : other;
        out.f_opt = wide ? other : basis;
        return out;
    }
    Eigen::BDCSVD<CMat> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.f_opt = svd.matrixV().leftCols(n_s);
    out.w_opt = svd.matrixU().leftCols(n_s);
    out.singular_values = svd.singularValues().head(n_s);
    return out;
}

CMat extract_phases(const CMat& x)
{
    return x.unaryExpr([](const cd& v) {
        double n2 = std::norm(v);
        return n2 > 0.0 ? v / std::sqrt(n2) : cd(1.0, 0.0);
    });
}

namespace
{

// Scaled orthogonal Procrustes: F_BB = alpha * U V^H with F_RF^H F_opt = U S V^H and alpha the
// least-squares gain for that direction.
CMat fit_digital(const CMat& f_rf, const CMat& f_opt)
{
    CMat a = f_rf.adjoint() * f_opt;
    Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    CMat f_dd = svd.matrixU() * svd.matrixV().adjoint();
    CMat p = f_rf * f_dd;
    double denom = p.squaredNorm();
    double alpha = denom > 0.0 ? (p.adjoint() * f_opt).trace().real() / denom : 0.0;
    return alpha * f_dd;
}

} // namespace

AltMinResult pe_altmin(const CMat& f_opt, Index n_rf, const AltMinOptions& options)
{
    const Index n_s = f_opt.cols();
    if (n_s < 1 || n_rf < n_s)
        throw InvalidParameter("pe_altmin: need n_rf >= n_s >= 1");
    if (!(options.tol > 0.0) || options.max_iter < 1)
        throw InvalidParameter("pe_altmin: tol must be positive and max_iter >= 1");

    CMat f_bb = CMat::Zero(n_rf, n_s);
    f_bb.topRows(n_s).setIdentity();
    CMat f_rf = extract_phases(f_opt * f_bb.adjoint());

    AltMinResult out;
    for (int it = 0; it < options.max_iter; ++it)
    {
        CMat f_bb_next = fit_digital(f_rf, f_opt);
        double obj = (f_opt - f_rf * f_bb_next).norm();
        if (!out.objective.empty())
        {
            double prev = out.objective.back();
            if (obj > prev)
            {
                // Non-square digital stage: the phase step is no longer an exact minimiser.
                out.converged = true;
                return out;
            }
        }
        out.f_rf = f_rf;
        out.f_bb = f_bb_next;
        out.objective.push_back(obj);
        if (out.objective.size() > 1 &&
            out.objective[out.objective.size() - 2] - obj < options.tol)
        {
            out.converged = true;
            return out;
        }
        f_rf = extract_phases(f_opt * f_bb_next.adjoint());
    }
    return out;
}

DigitalStage digital_from_svd(const CMat& h_eq)
{
    if (h_eq.rows() != h_eq.cols())
        throw InvalidParameter("digital_from_svd: equivalent channel must be square");
    Eigen::JacobiSVD<CMat> svd(h_eq, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

double normalize_rho(const CMat& f_rf, const CMat& f_bb, Index n_s)
{
    double norm = (f_rf * f_bb).norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw DegenerateError("normalize_rho: F_RF F_BB is zero");
    return std::sqrt(static_cast<double>(n_s)) / norm;
}

HybridDesign design_hybrid(const CMat& h, Index n_s, Index n_rf, const AltMinOptions& options)
{
    if (n_rf < n_s)
        throw InvalidParameter("design_hybrid: n_rf must be >= n_s");
    if (n_rf > std::min(h.rows(), h.cols()))
        throw InvalidParameter("design_hybrid: n_rf exceeds the antenna counts");
    HybridDesign d;
    d.fdp = optimal_fdp(h, n_s);

    d.tx = pe_altmin(d.fdp.f_opt, n_rf, options);
    d.rx = pe_altmin(d.fdp.w_opt, n_rf, options);

    PrecoderSet& p = d.pset;
    p.f_rf = d.tx.f_rf;
    p.w_rf = d.rx.f_rf;
    DigitalStage dig = digital_from_svd(equivalent_channel(h, p.f_rf, p.w_rf));
    p.u_bb = dig.u_bb.leftCols(n_s);
    p.f_bb = dig.f_bb_raw.leftCols(n_s);
    p.v_diag = dig.v_diag.head(n_s);
    p.rho = normalize_rho(p.f_rf, p.f_bb, n_s);
    return d;
}

RVec noise_shaping(const PrecoderSet& pset)
{
    return (pset.w_rf * pset.u_bb).colwise().squaredNorm().transpose();
}

double rx_power_factor(const CMat& h, const CMat& f_rf)
{
    // |h_q^T F_RF F_RF^H h_q^*| = ||(H F_RF)_q||^2, averaged over receive rows.
    return (h * f_rf).squaredNorm() / static_cast<double>(h.rows());
}

StreamMetrics stream_metrics(const PrecoderSet& pset, const CMat& h, double sigma2)
{
    if (!(sigma2 > 0.0))
        throw InvalidParameter("stream_metrics: noise variance must be positive");
    StreamMetrics m;
    m.xi = noise_shaping(pset);
    if ((m.xi.array() <= 0.0).any())
        throw DegenerateError("stream_metrics: non-positive noise shaping factor");
    m.omega = rx_power_factor(h, pset.f_rf);
    m.beta = (pset.rho * pset.rho) * pset.v_diag.array().square() / (sigma2 * m.xi.array());
    return m;
}

RVec beta_from_rx_snr(const RVec& v_diag, const RVec& xi, double omega, double snr_rx)
{
    return v_diag.array().square() * snr_rx / (xi.array().abs() * omega);
}

double noise_variance_for_rx_snr(double rho, double omega, double snr_rx)
{
    if (!(snr_rx > 0.0))
        throw InvalidParameter("noise_variance_for_rx_snr: SNR must be positive");
    return rho * rho * omega / snr_rx;
}

CMat signal_matrix(const PrecoderSet& pset, const CMat& h)
{
    return pset.rho * (pset.u_bb.adjoint() * equivalent_channel(h, pset.f_rf, pset.w_rf) * pset.f_bb);
}

double isi_leakage(const PrecoderSet& pset, const CMat& h)
{
    CMat v = pset.u_bb.adjoint() * equivalent_channel(h, pset.f_rf, pset.w_rf) * pset.f_bb;
    double worst = 0.0;
    for (Index k = 0; k < v.rows(); ++k)
        for (Index i = 0; i < v.cols(); ++i)
            if (k != i)
                worst = std::max(worst, std::abs(v(k, i)));
    return worst / std::abs(v(0, 0));
}

} // namespace hpgpn
