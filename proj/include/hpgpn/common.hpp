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

#ifndef HPGPN_COMMON_HPP
#define HPGPN_COMMON_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hpgpn
{

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RVectorT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using cd = std::complex<double>;
using CMat = CMatrixT<double>;
using CVec = CVectorT<double>;
using RVec = RVectorT<double>;
using Index = Eigen::Index;

inline constexpr double kPi = std::numbers::pi;

// Raised when a caller passes an argument outside an operation's domain.
class InvalidParameter : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Raised when the numerics collapse (zero precoder, zero singular value on a used stream, ...).
class DegenerateError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Wraps an angle to (-pi, pi].
inline double wrap_phase(double x)
{
    double y = std::remainder(x, 2.0 * kPi);
    if (y <= -kPi)
        y += 2.0 * kPi;
    return y;
}

} // namespace hpgpn

#endif
