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

#include "frachelm/types.hpp"

namespace frachelm {

double gamma_fn(double x);

// Real-argument Bessel functions, x >= 0 (x > 0 for Y).
double bessel_j0(double x);
double bessel_j1(double x);
double bessel_y0(double x);
double bessel_y1(double x);

// Hankel functions of the first kind, principal branch, cut on (-inf, 0].
cplx hankel1_0(cplx z);
cplx hankel1_1(cplx z);

// Struve-type functions of the second kind, K_nu = H_nu - Y_nu, from
// K0(z) = (2/pi) int_0^inf J0(t)/(t+z) dt and K1(z) = 2/pi - K0'(z).
cplx struve_k0(cplx z);
cplx struve_k1(cplx z);

// Exponential integral E1, principal branch.
cplx expint_e1(cplx z);

// Gamma(n/2 - s(j+1)) / (4^{s(j+1)} pi^{n/2} Gamma(s(j+1))).
double riesz_constant(int n, double s, int j);

namespace detail {

// Crossover radii between evaluation paths; exposed for the overlap tests.
inline constexpr double kBesselSeriesRadius = 4.0;
inline constexpr double kBesselAsymptoticRadius = 17.0;
inline constexpr double kHankelIntegralImag = 1.5;
inline constexpr double kStruveAsymptoticRadius = 30.0;
inline constexpr double kE1SeriesRadius = 2.0;

struct BesselSet {
    cplx j0, j1, y0, y1;
};

BesselSet bessel_series(cplx z);
BesselSet bessel_miller(cplx z);
void hankel_asymptotic(cplx z, cplx& h0, cplx& h1);
void hankel_integral(cplx z, cplx& h0, cplx& h1);
cplx struve_k0_integral(cplx z);
cplx struve_k1_integral(cplx z);
cplx struve_k0_asymptotic(cplx z);
cplx struve_k1_asymptotic(cplx z);
cplx expint_e1_series(cplx z);
cplx expint_e1_fraction(cplx z);

}  // namespace detail

}  // namespace frachelm
