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

#include <array>

#include "frachelm/types.hpp"

namespace frachelm {

enum class Branch { High, LowGeneric, LowInteger };

const char* branch_name(Branch b);

struct Regime {
    Branch branch;
    int m;  // floor(1/(2s)); 0 on the high branch
};

// Orders within this distance of 1/(2m) are treated as exactly 1/(2m).
inline constexpr double kRegimeSnapTol = 1e-12;

Regime classify_regime(double s);

// Returns 1/(2m) when s lies inside the snap tolerance of it, s otherwise.
double snap_order(double s);

struct Problem {
    int n = 3;
    double s = 0.5;
    double k = 1.0;

    void validate() const;
    Regime regime() const { return classify_regime(s); }
};

// Validates and snaps s onto an integer-regime boundary when within tolerance.
Problem make_problem(int n, double s, double k);

struct SpectralShift {
    double epsilon = 0.0;
    cplx k_eps{1.0, 0.0};   // (k^{2s} + i eps)^{1/(2s)}, principal branch
    cplx k_pow2s{1.0, 0.0}; // k^{2s} + i eps
};

SpectralShift make_shift(const Problem& p, double epsilon);

double poly_P(double X, double kappa, double s);

cplx F_m(double r, cplx kc, double s, int m);
cplx F_tilde_m(double r, cplx kc, double s, int m);

cplx multiplier_M(double xi, cplx z, double s);

cplx helm_part(int n, double s, cplx kc, double r);
cplx helm_part_derivative(int n, double s, cplx kc, double r);

// n = 1, 3: full integrand e^{-y}(...) of the tail integral after the change of
// variable y = r*u, so that j_tail = int_0^inf j_tail_integrand dy.
// n = 2: J0(y r) y F(y) with F = F_m, or F~_m on the integer branch; the
// 2D tail is this integrand's integral divided by 2 pi.
cplx j_tail_integrand(int n, double s, int m, cplx kc, double r, double y);

// F_m or F~_m as an analytic function of the radial frequency with a Taylor
// window around the removable point rho = k_eps.
class RadialKernel {
public:
    static constexpr int kTaylorTerms = 8;
    static constexpr double kWindow = 1e-3;  // relative to |k_eps|

    RadialKernel(cplx kc, double s, int m, bool corrected);

    cplx value(double rho) const;
    cplx derivative(double rho) const;  // d/d rho
    cplx direct(cplx w) const;          // closed form, no window
    cplx direct_derivative(cplx w) const;
    bool in_window(double rho) const { return std::abs(rho - kc_) < window_; }
    cplx taylor_value(double rho) const;

private:
    cplx kc_;
    double s_;
    int m_;
    bool corrected_;
    cplx K_, Km_, helm_coef_;
    double window_;
    bool use_window_;
    std::array<cplx, kTaylorTerms> coef_{};
};

}  // namespace frachelm
