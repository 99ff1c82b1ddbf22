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

QuadratureSpec default_oracle_spec();

// Direct inversion of the symbol 1/(|xi|^{2s} - k_eps^{2s}); eps > 0 only.
QuadResult fourier_invert(const Problem& p, const SpectralShift& shift, double r,
                          const QuadratureSpec& spec = default_oracle_spec());

struct TruncatedInversion {
    cplx value{0.0, 0.0};
    double err_estimate = 0.0;
    double tail_bound = 0.0;  // modulus of the first neglected half-oscillation
    double cutoff = 0.0;      // the oscillation zero actually used
};

// Plain adaptive integration of the same integrand on [0, Xi'] with Xi' the
// first oscillation zero >= xi_max, no extrapolation.
TruncatedInversion fourier_invert_truncated(const Problem& p, const SpectralShift& shift, double r,
                                            double xi_max, const QuadratureSpec& spec = default_oracle_spec());

}  // namespace frachelm
