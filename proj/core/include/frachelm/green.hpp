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

#include "frachelm/kernels.hpp"
#include "frachelm/quadrature.hpp"

namespace frachelm {

struct GreenDecomposition {
    cplx helm{0.0, 0.0};
    cplx riesz_sum{0.0, 0.0};
    cplx j_tail{0.0, 0.0};
    cplx total{0.0, 0.0};
    double err_estimate = 0.0;
};

QuadratureSpec default_green_spec();       // rel_tol 1e-9
QuadratureSpec default_derivative_spec();  // rel_tol 1e-7

GreenDecomposition green_eval(const Problem& p, const SpectralShift& shift, double r,
                              const QuadratureSpec& spec = default_green_spec());

// d/dr of the same three parts; total is their sum.
GreenDecomposition green_radial_derivative(const Problem& p, const SpectralShift& shift, double r,
                                           const QuadratureSpec& spec = default_derivative_spec());

// r^{(n-1)/2} |G'(r) - i k G(r)| at eps = 0.
double src_residual(const Problem& p, double r, const QuadratureSpec& spec = default_green_spec());

// n = 3, s = 1/2 closed form through E1, and its r-derivative.
cplx green_closed_form_3d_half(double k, double r);
cplx green_closed_form_3d_half_derivative(double k, double r);

// Riesz sum sum_{j<m} c_{n,j} K^j / r^{n-2s(j+1)} (zero for n = 1 and on the high branch).
cplx riesz_sum(const Problem& p, cplx k_pow2s, double r);

}  // namespace frachelm
