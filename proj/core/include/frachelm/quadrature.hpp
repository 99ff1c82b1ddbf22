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

#include <functional>
#include <vector>

#include "frachelm/types.hpp"

namespace frachelm {

struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-30;
    int max_subdiv = 4000;
    int laguerre_order = 64;
    int bessel_intervals = 30;

    void validate() const;
};

struct QuadResult {
    cplx value{0.0, 0.0};
    double err_estimate = 0.0;
    long evaluations = 0;
};

using ComplexFn = std::function<cplx(double)>;

// Adaptive Gauss-Kronrod (10/21) on [a, b]. Optional interior breakpoints
// seed the initial partition.
QuadResult integrate_adaptive(const ComplexFn& f, double a, double b, const QuadratureSpec& spec,
                              const std::vector<double>& breakpoints = {});

// Integral of e^{-y} f(y) over (0, inf). Adaptive on [0, y_cut], Gauss-Laguerre beyond.
QuadResult integrate_exp_weighted(const ComplexFn& f, const QuadratureSpec& spec, double y_cut = 10.0,
                                  const std::vector<double>& breakpoints = {});

// Integral of f over (0, inf) where f oscillates with known sign changes at
// zero(0) < zero(1) < ... . The head up to the first zero past head_end is
// integrated adaptively; the tail is summed interval by interval and
// extrapolated by iterated averaging of the partial sums.
QuadResult integrate_partitioned(const ComplexFn& f, const std::function<double(long)>& zero,
                                 double head_end, const QuadratureSpec& spec,
                                 const std::vector<double>& breakpoints = {});

// Integral of J0(rho r) g(rho) over (0, inf). `features` lists rho-locations
// where g varies rapidly; the head extends past them before extrapolation starts.
QuadResult integrate_bessel_transform(const ComplexFn& g, double r, const QuadratureSpec& spec,
                                      const std::vector<double>& features = {});

// l-th positive zero of J0 (l = 0, 1, ...).
double bessel_j0_zero(long l);

// Gauss-Laguerre nodes and weights (alpha = 0), cached per order.
void gauss_laguerre(int order, std::vector<double>& nodes, std::vector<double>& weights);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace frachelm
