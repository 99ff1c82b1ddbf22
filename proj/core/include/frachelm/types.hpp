// Copyright 2026 The frachelm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace frachelm {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;
inline constexpr cplx kI{0.0, 1.0};

// Raised when an argument violates an operation's preconditions.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a quadrature or extrapolation could not meet its tolerance.
// The best available estimate travels with the exception.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, cplx best, double err)
        : std::runtime_error(what), best_estimate(best), err_estimate(err) {}
    cplx best_estimate;
    double err_estimate;
};

// Raised by the scattering solver when the system matrix is numerically singular.
class NearResonanceError : public std::runtime_error {
public:
    NearResonanceError(const std::string& what, double rcond)
        : std::runtime_error(what), indicator(rcond) {}
    double indicator;
};

const char* version_string();

}  // namespace frachelm
