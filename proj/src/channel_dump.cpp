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

#include "hpgpn/channel_dump.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

namespace hpgpn
{

namespace
{

constexpr std::array<char, 8> kMagic{'H', 'P', 'G', 'P', 'N', 'C', 'H', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename U>
void put(std::ostream& os, U v)
{
    std::array<char, sizeof(U)> buf;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    os.write(buf.data(), buf.size());
}

void put_f64(std::ostream& os, double x) { put(os, std::bit_cast<std::uint64_t>(x)); }

template <typename U>
U get(std::istream& is)
{
    std::array<unsigned char, sizeof(U)> buf{};
    if (!is.read(reinterpret_cast<char*>(buf.data()), buf.size()))
        throw DumpFormatError("channel dump: truncated record");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        v |= static_cast<U>(buf[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get<std::uint64_t>(is)); }

void put_matrix(std::ostream& os, const CMat& m)
{
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
        {
            put_f64(os, m(i, j).real());
            put_f64(os, m(i, j).imag());
        }
}

CMat get_matrix(std::istream& is, Index rows, Index cols)
{
    CMat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
        {
            double re = get_f64(is);
            double im = get_f64(is);
            m(i, j) = cd(re, im);
        }
    return m;
}

std::uint32_t dim(Index n)
{
    if (n < 0 || n > static_cast<Index>(0xFFFFFFFFu))
        throw InvalidParameter("channel dump: dimension out of range");
    return static_cast<std::uint32_t>(n);
}

} // namespace

void write_channel_dump(std::ostream& os, const std::vector<ChannelRecord>& records)
{
    os.write(kMagic.data(), kMagic.size());
    put(os, kVersion);
    put(os, std::uint32_t{0});
    for (const ChannelRecord& rec : records)
    {
        const ChannelParams& p = rec.params;
        if (rec.h.rows() != p.n_rx || rec.h.cols() != p.n_tx)
            throw InvalidParameter("channel dump: H does not match the record parameters");
        put(os, dim(p.n_tx));
        put(os, dim(p.n_rx));
        put(os, dim(p.n_clusters));
        put(os, dim(p.n_rays));
        put_f64(os, p.angular_spread_deg);
        put(os, p.seed);
        put(os, rec.realization);
        put(os, std::uint32_t{rec.precoders ? 1u : 0u});
        put(os, std::uint32_t{0});
        put_matrix(os, rec.h);
        if (rec.precoders)
        {
            const PrecoderSet& ps = *rec.precoders;
            put(os, dim(ps.n_rf()));
            put(os, dim(ps.n_s()));
            put_matrix(os, ps.f_rf);
            put_matrix(os, ps.f_bb);
            put_matrix(os, ps.w_rf);
            put_matrix(os, ps.u_bb);
            for (Index k = 0; k < ps.n_s(); ++k)
                put_f64(os, ps.v_diag(k));
            put_f64(os, ps.rho);
        }
    }
    if (!os)
        throw std::runtime_error("channel dump: write failed");
}

std::vector<ChannelRecord> read_channel_dump(std::istream& is)
{
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic)
        throw DumpFormatError("channel dump: bad magic");
    if (get<std::uint32_t>(is) != kVersion)
        throw DumpFormatError("channel dump: unsupported version");
    get<std::uint32_t>(is);

    std::vector<ChannelRecord> out;
    while (is.peek() != std::char_traits<char>::eof())
    {
        ChannelRecord rec;
        rec.params.n_tx = get<std::uint32_t>(is);
        rec.params.n_rx = get<std::uint32_t>(is);
        rec.params.n_clusters = get<std::uint32_t>(is);
        rec.params.n_rays = get<std::uint32_t>(is);
        rec.params.angular_spread_deg = get_f64(is);
        rec.params.seed = get<std::uint64_t>(is);
        rec.realization = get<std::uint64_t>(is);
        std::uint32_t flags = get<std::uint32_t>(is);
        get<std::uint32_t>(is);
        try
        {
            rec.params.validate();
        }
        catch (const InvalidParameter& e)
        {
            throw DumpFormatError(std::string("channel dump: ") + e.what());
        }
        rec.h = get_matrix(is, rec.params.n_rx, rec.params.n_tx);
        if (flags & 1u)
        {
            Index n_rf = get<std::uint32_t>(is);
            Index n_s = get<std::uint32_t>(is);
            if (n_s < 1 || n_rf < n_s || n_rf > std::min(rec.params.n_tx, rec.params.n_rx))
                throw DumpFormatError("channel dump: inconsistent precoder dimensions");
            PrecoderSet ps;
            ps.f_rf = get_matrix(is, rec.params.n_tx, n_rf);
            ps.f_bb = get_matrix(is, n_rf, n_s);
            ps.w_rf = get_matrix(is, rec.params.n_rx, n_rf);
            ps.u_bb = get_matrix(is, n_rf, n_s);
            ps.v_diag.resize(n_s);
            for (Index k = 0; k < n_s; ++k)
                ps.v_diag(k) = get_f64(is);
            ps.rho = get_f64(is);
            rec.precoders = std::move(ps);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace hpgpn
