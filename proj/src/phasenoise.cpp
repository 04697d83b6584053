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

#include "hpgpn/phasenoise.hpp"

#include <cmath>

namespace hpgpn
{

std::string to_string(PnRegime regime)
{
    switch (regime)
    {
    case PnRegime::Off: return "off";
    case PnRegime::Low: return "low";
    case PnRegime::Medium: return "medium";
    case PnRegime::Strong: return "strong";
    case PnRegime::Custom: return "custom";
    }
    return "custom";
}

PnRegime parse_pn_regime(const std::string& name)
{
    if (name == "off")
        return PnRegime::Off;
    if (name == "low")
        return PnRegime::Low;
    if (name == "medium")
        return PnRegime::Medium;
    if (name == "strong")
        return PnRegime::Strong;
    throw InvalidParameter("unknown phase-noise regime '" + name + "'");
}

PnConfig PnConfig::from_regime(PnRegime regime)
{
    double total = 0.0;
    switch (regime)
    {
    case PnRegime::Off: total = 0.0; break;
    case PnRegime::Low: total = 1e-3; break;
    case PnRegime::Medium: total = 1e-2; break;
    case PnRegime::Strong: total = 1e-1; break;
    case PnRegime::Custom:
        throw InvalidParameter("PnConfig::from_regime: custom regime has no preset variance");
    }
    return {0.5 * total, 0.5 * total, regime};
}

PnConfig PnConfig::from_total(double sigma2_psi)
{
    if (!(sigma2_psi >= 0.0) || !std::isfinite(sigma2_psi))
        throw InvalidParameter("PnConfig: phase-noise variance must be finite and >= 0");
    PnConfig cfg{0.5 * sigma2_psi, 0.5 * sigma2_psi, PnRegime::Custom};
    for (PnRegime r : {PnRegime::Off, PnRegime::Low, PnRegime::Medium, PnRegime::Strong})
        if (from_regime(r).sigma2_psi() == sigma2_psi)
            cfg.regime = r;
    return cfg;
}

PnTrace sample_pn(const PnConfig& cfg, Index n_symbols, StreamRng& rng)
{
    if (n_symbols < 1)
        throw InvalidParameter("sample_pn: need at least one symbol");
    if (cfg.sigma2_tx < 0.0 || cfg.sigma2_rx < 0.0)
        throw InvalidParameter("sample_pn: variances must be >= 0");
    const double sd_tx = std::sqrt(cfg.sigma2_tx);
    const double sd_rx = std::sqrt(cfg.sigma2_rx);
    PnTrace t;
    t.psi.resize(n_symbols);
    t.phi_rx.resize(n_symbols);
    for (Index k = 0; k < n_symbols; ++k)
    {
        double phi_tx = sd_tx * rng.normal();
        double phi_rx = sd_rx * rng.normal();
        t.phi_rx(k) = phi_rx;
        t.psi(k) = phi_tx + phi_rx;
    }
    return t;
}

CVec apply_clo(const CVec& s, const PrecoderSet& pset, const CMat& h, const CVec& noise,
               const PnTrace& trace, Index k)
{
    if (s.size() != pset.n_s() || noise.size() != h.rows() || k < 0 || k >= trace.psi.size())
        throw InvalidParameter("apply_clo: dimension mismatch");
    const cd rot_total = std::polar(1.0, trace.psi(k));
    const cd rot_rx = std::polar(1.0, trace.phi_rx(k));
    CVec signal = signal_matrix(pset, h) * s;
    CVec combined_noise = pset.u_bb.adjoint() * (pset.w_rf.adjoint() * noise);
    return rot_total * signal + rot_rx * combined_noise;
}

StreamLink::StreamLink(const PrecoderSet& pset, const CMat& h)
    : gain_(signal_matrix(pset, h)), w_(pset.n_s())
{
    CMat c = pset.w_rf * pset.u_bb;
    CMat gram = c.adjoint() * c;
    Eigen::LLT<CMat> llt(gram);
    if (llt.info() != Eigen::Success)
        throw DegenerateError("StreamLink: combiner Gram matrix is not positive definite");
    noise_factor_ = llt.matrixL();
}

void StreamLink::receive(const CVec& s, double psi, double phi_rx, double sigma2, StreamRng& rng,
                         CVec& out) const
{
    for (Index i = 0; i < w_.size(); ++i)
        w_(i) = rng.complex_normal(sigma2);
    out.noalias() = gain_ * s;
    out *= std::polar(1.0, psi);
    out.noalias() += std::polar(1.0, phi_rx) * (noise_factor_ * w_);
}

double estimate_pn(std::span<const Index> pilot_streams, const CVec& r, const CVec& pilots,
                   const PrecoderSet& pset)
{
    if (pilot_streams.empty())
        throw InvalidParameter("estimate_pn: need at least one pilot stream");
    if (static_cast<Index>(pilot_streams.size()) != pilots.size())
        throw InvalidParameter("estimate_pn: one pilot symbol per pilot stream");
    cd acc(0.0, 0.0);
    for (std::size_t i = 0; i < pilot_streams.size(); ++i)
    {
        Index q = pilot_streams[i];
        if (q < 0 || q >= r.size() || q >= pset.v_diag.size())
            throw InvalidParameter("estimate_pn: pilot stream index out of range");
        double gain = pset.rho * pset.v_diag(q);
        double energy = std::norm(pilots(static_cast<Index>(i)));
        if (!(gain > 0.0) || !(energy > 0.0))
            throw DegenerateError("estimate_pn: pilot stream unusable (zero singular value or pilot)");
        acc += r(q) * std::conj(pilots(static_cast<Index>(i))) / (gain * energy);
    }
    acc /= static_cast<double>(pilot_streams.size());
    return std::arg(acc);
}

CVec compensate(const CVec& r, double psi_hat)
{
    return std::polar(1.0, -psi_hat) * r;
}

} // namespace hpgpn
