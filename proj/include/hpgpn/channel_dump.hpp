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

#ifndef HPGPN_CHANNEL_DUMP_HPP
#define HPGPN_CHANNEL_DUMP_HPP

#include "hpgpn/channel.hpp"
#include "hpgpn/precoding.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hpgpn
{

/// One realization in a channel dump. `seed` and `realization` identify the stream that
/// produced it, so a record can be regenerated and compared bit for bit.
struct ChannelRecord
{
    ChannelParams params;
    std::uint64_t realization = 0;
    CMat h;
    std::optional<PrecoderSet> precoders;
};

class DumpFormatError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Layout (all little-endian):
//   header  "HPGPNCH1", u32 version (= 1), u32 reserved
//   record  u32 n_tx, n_rx, n_clusters, n_rays; f64 angular_spread_deg; u64 seed;
//           u64 realization; u32 flags (bit 0: precoders follow); u32 reserved;
//           H as n_rx * n_tx (re, im) f64 pairs, row-major
//           [u32 n_rf, n_s; F_RF, F_BB, W_RF, U_BB row-major (re, im); v_diag; f64 rho]
// Records run until end of stream.
void write_channel_dump(std::ostream& os, const std::vector<ChannelRecord>& records);
std::vector<ChannelRecord> read_channel_dump(std::istream& is);

} // namespace hpgpn

#endif
