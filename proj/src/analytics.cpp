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

#include "hpgpn/analytics.hpp"

#include "hpgpn/modulation.hpp"

#include <cmath>
#include <numbers>

namespace hpgpn::analytics
{

namespace
{

struct Qam16Geometry
{
    double rho1, rho2, theta1, theta2;
};

// Taken from the constellation itself; the unit tests pin it to the closed forms.
const Qam16Geometry& qam16_geometry()
{
    static const Qam16Geometry g = [] {
        PolarGeometry pg = build_qam(16).polar_geometry();
        return Qam16Geometry{pg.delta_rho.at(0), pg.delta_rho.at(1), pg.delta_theta.at(0),
                             pg.delta_theta.at(1)};
    }();
    return g;
}

void check_streams(const AnalyticInputs& in)
{
    if (in.n_s < 1 || in.v_diag.size() < in.n_s || in.xi.size() < in.n_s)
        throw InvalidParameter("analytics: inputs carry fewer streams than n_s");
    if (in.n_pil < 0 || in.n_pil >= in.n_s)
        throw InvalidParameter("analytics: n_pil must be in [0, n_s)");
}

} // namespace

double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

RVec AnalyticInputs::beta() const
{
    return (rho * rho) * v_diag.head(n_s).array().square() / (sigma2 * xi.head(n_s).array());
}

RVec AnalyticInputs::beta_rx() const
{
    return v_diag.head(n_s).array().square() * snr_rx / (xi.head(n_s).array().abs() * omega);
}

double se_no_pn(const RVec& beta)
{
    if ((beta.array() < 0.0).any())
        throw InvalidParameter("se_no_pn: per-stream SNR must be >= 0");
    return (1.0 + beta.array()).log2().sum();
}

double se_no_pn(const AnalyticInputs& in)
{
    check_streams(in);
    return se_no_pn(in.beta());
}

double se_pilot(const AnalyticInputs& in)
{
    check_streams(in);
    RVec b = in.beta();
    return se_no_pn(RVec(b.tail(in.n_s - in.n_pil)));
}

double se_pn_lower_bound(const AnalyticInputs& in)
{
    check_streams(in);
    if (in.sigma2_psi < 0.0)
        throw InvalidParameter("se_pn_lower_bound: phase-noise variance must be >= 0");
    const double e = std::exp(in.sigma2_psi);
    const double r2 = in.rho * in.rho;
    double total = 0.0;
    for (Index k = 0; k < in.n_s; ++k)
    {
        double v2 = in.v_diag(k) * in.v_diag(k);
        double sinr = r2 * v2 / (r2 * std::expm1(in.sigma2_psi) * v2 + in.sigma2 * e * in.xi(k));
        total += std::log2(1.0 + sinr);
    }
    return total;
}

double se_pn_high_snr(double sigma2_psi, Index n_s)
{
    if (!(sigma2_psi > 0.0))
        throw InvalidParameter("se_pn_high_snr: phase-noise variance must be positive");
    // log2(e^s / (e^s - 1)) = -log2(1 - e^{-s})
    return -static_cast<double>(n_s) * std::log2(-std::expm1(-sigma2_psi));
}

double pn_characteristic(double sigma2_psi) { return std::exp(-0.5 * sigma2_psi); }

double coherent_gain_sq(double v_kk, double sigma2_psi)
{
    double c = pn_characteristic(sigma2_psi) * v_kk;
    return c * c;
}

double interference_power_kappa(double v_kk, double sigma2_psi)
{
    return -std::expm1(-sigma2_psi) * v_kk * v_kk;
}

double combined_noise_power(double sigma2, double xi_k) { return sigma2 * xi_k; }

double pn_sinr(double rho, double v_kk, double xi_k, double sigma2, double sigma2_psi)
{
    double r2 = rho * rho;
    return r2 * coherent_gain_sq(v_kk, sigma2_psi) /
           (r2 * interference_power_kappa(v_kk, sigma2_psi) + combined_noise_power(sigma2, xi_k));
}

double ber_no_pn_qam(const RVec& beta, int m)
{
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    if (m < 4 || side * side != m || (side & (side - 1)) != 0)
        throw InvalidParameter("ber_no_pn_qam: square QAM order required");
    if (beta.size() == 0)
        throw InvalidParameter("ber_no_pn_qam: no streams");
    const int half_bits = static_cast<int>(std::lround(std::log2(side)));
    const double log2m = 2.0 * half_bits;
    double total = 0.0;
    for (Index k = 0; k < beta.size(); ++k)
    {
        for (int p = 1; p <= half_bits; ++p)
        {
            const int weight = 1 << (p - 1);
            const int c_max = static_cast<int>((1.0 - std::ldexp(1.0, -p)) * side) - 1;
            for (int c = 0; c <= c_max; ++c)
            {
                const int fl = (c * weight) / side;
                const double sign = (fl % 2 == 0) ? 1.0 : -1.0;
                const double mult = weight - std::floor(static_cast<double>(c * weight) / side + 0.5);
                const double arg = std::sqrt(3.0 * (2.0 * c + 1) * (2.0 * c + 1) * beta(k) / (m - 1.0));
                total += sign * mult * qfunc(arg);
            }
        }
    }
    return 4.0 / (static_cast<double>(beta.size()) * side * log2m) * total;
}

double ber_no_pn_qam(const AnalyticInputs& in)
{
    check_streams(in);
    RVec b = in.beta();
    return ber_no_pn_qam(RVec(b.tail(in.n_s - in.n_pil)), in.m);
}

Qam16LevelErrors qam16_level_errors(double beta_k, double sigma2_psi)
{
    const Qam16Geometry& g = qam16_geometry();
    const double sigma_n = std::sqrt(1.0 / (2.0 * beta_k));
    const double sigma_theta = std::sqrt(sigma2_psi + sigma_n * sigma_n);
    const double q_rho1 = qfunc(g.rho1 / (2.0 * sigma_n));
    const double q_rho2 = qfunc(g.rho2 / (2.0 * sigma_n));
    const double q_theta1 = qfunc(g.theta1 / (2.0 * sigma_theta));
    const double q_theta2 = qfunc(g.theta2 / (2.0 * sigma_theta));
    Qam16LevelErrors e;
    e.inner_outer = 8.0 * (q_rho1 + q_rho2) + 16.0 * q_theta1;
    e.middle = 16.0 * (q_rho2 + q_theta2);
    return e;
}

double qam16_stream_error(double beta_k, double sigma2_psi)
{
    const Qam16Geometry& g = qam16_geometry();
    const double sigma_n = std::sqrt(1.0 / (2.0 * beta_k));
    const double sigma_theta = std::sqrt(sigma2_psi + sigma_n * sigma_n);
    return 0.5 * (qfunc(g.rho1 / (2.0 * sigma_n)) + 3.0 * qfunc(g.rho2 / (2.0 * sigma_n))) +
           qfunc(g.theta1 / (2.0 * sigma_theta)) + qfunc(g.theta2 / (2.0 * sigma_theta));
}

double ber_16qam_pn(const RVec& beta, double sigma2_psi)
{
    if (beta.size() == 0)
        throw InvalidParameter("ber_16qam_pn: no streams");
    double total = 0.0;
    for (Index k = 0; k < beta.size(); ++k)
        total += qam16_stream_error(beta(k), sigma2_psi);
    return total / (4.0 * static_cast<double>(beta.size()));
}

double ber_16qam_pn(const AnalyticInputs& in)
{
    check_streams(in);
    if (in.m != 16)
        throw InvalidParameter("ber_16qam_pn: 16-QAM only");
    RVec b = in.beta();
    return ber_16qam_pn(RVec(b.tail(in.n_s - in.n_pil)), in.sigma2_psi);
}

double ber_16qam_floor(double sigma2_psi)
{
    const Qam16Geometry& g = qam16_geometry();
    const double s = std::sqrt(sigma2_psi);
    return 0.25 * (qfunc(g.theta1 / (2.0 * s)) + qfunc(g.theta2 / (2.0 * s)));
}

double pqam_stream_ber(double v_kk, double xi_k, double omega, double snr_rx, double sigma2_psi,
                       int m, int gamma)
{
    if (m < 2 || gamma < 1 || m % gamma != 0)
        throw InvalidParameter("pqam_stream_ber: invalid (M, gamma)");
    const double g = static_cast<double>(gamma);
    const double snr_k = v_kk * v_kk * snr_rx / (omega * std::abs(xi_k));
    const double amp = qfunc(std::sqrt(6.0 * snr_k / (4.0 * g * g - 1.0)));
    const double phase = qfunc(kPi * g / (m * std::sqrt(sigma2_psi + 1.0 / (2.0 * snr_k))));
    return 2.0 / std::log2(static_cast<double>(m)) * (amp + phase);
}

double ber_pqam_pn(const AnalyticInputs& in)
{
    check_streams(in);
    const int gamma = in.gamma > 0 ? in.gamma : 1;
    double total = 0.0;
    for (Index k = in.n_pil; k < in.n_s; ++k)
        total += pqam_stream_ber(in.v_diag(k), in.xi(k), in.omega, in.snr_rx, in.sigma2_psi, in.m, gamma);
    return total / static_cast<double>(in.n_s - in.n_pil);
}

double ber_pqam_floor(double sigma2_psi, int m, int gamma)
{
    return 2.0 / std::log2(static_cast<double>(m)) *
           qfunc(kPi * gamma / (m * std::sqrt(sigma2_psi)));
}

double ber_4qam_floor(double sigma2_psi) { return qfunc(kPi / (4.0 * std::sqrt(sigma2_psi))); }

} // namespace hpgpn::analytics
