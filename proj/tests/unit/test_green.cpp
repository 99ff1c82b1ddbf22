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

#include <doctest.h>

#include <cmath>

#include "frachelm/green.hpp"
#include "frachelm/specfun.hpp"
#include "reference_values.hpp"

using namespace frachelm;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("absorbing G against direct inversion") {
    for (const auto& c : ref::kGreen) {
        const Problem p = make_problem(c.n, c.s, c.k);
        const GreenDecomposition g = green_eval(p, make_shift(p, c.eps), c.r);
        INFO("n=" << c.n << " s=" << c.s << " r=" << c.r);
        CHECK(rel(g.total, c.g) < 1e-8);
    }
}

TEST_CASE("3D s = 1/2 closed form") {
    for (double k : {0.5, 1.0, 2.0}) {
        const Problem p = make_problem(3, 0.5, k);
        const SpectralShift sh = make_shift(p, 0.0);
        for (double r : {0.1, 1.0, 10.0}) {
            CHECK(rel(green_eval(p, sh, r).total, green_closed_form_3d_half(k, r)) < 1e-8);
            CHECK(rel(green_radial_derivative(p, sh, r).total, green_closed_form_3d_half_derivative(k, r)) < 1e-6);
        }
    }
    // non-Helmholtz part decays like r^-4
    double lo = 1e300, hi = 0;
    for (double r = 10; r <= 1e4; r *= 2) {
        const double v = std::abs(green_closed_form_3d_half(1.0, r) - std::exp(kI * r) / (2 * kPi * r)) * std::pow(r, 4);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo < 2.0);
    const double r = 1e-4;
    CHECK(std::abs(green_closed_form_3d_half(1.0, r)) * 2 * kPi * kPi * r * r == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("decomposition is exact") {
    for (int n = 1; n <= 3; ++n)
        for (double s : {0.25, 0.3, 0.5, 0.75}) {
            const Problem p = make_problem(n, s, 1.0);
            const GreenDecomposition g = green_eval(p, make_shift(p, 0.0), 1.3);
            CHECK(g.total == g.helm + g.riesz_sum + g.j_tail);
            if (p.regime().branch == Branch::High) CHECK(g.riesz_sum == cplx(0.0, 0.0));
            CHECK(g.err_estimate >= 0.0);
        }
}

TEST_CASE("Riesz term in 3D") {
    const Problem p = make_problem(3, 0.5, 1.0);
    const GreenDecomposition g = green_eval(p, make_shift(p, 0.0), 1.0);
    CHECK(std::abs(g.riesz_sum - 1.0 / (2 * kPi * kPi)) < 1e-15);
}

TEST_CASE("radial derivative against finite differences") {
    for (int n = 1; n <= 3; ++n)
        for (double s : {0.25, 0.3, 0.5, 0.75})
            for (double eps : {0.0, 0.5}) {
                const Problem p = make_problem(n, s, 1.0);
                const SpectralShift sh = make_shift(p, eps);
                const double r = 2.0, h = 1e-3;
                auto G = [&](double x) { return green_eval(p, sh, x).total; };
                const cplx fd = (8.0 * (G(r + h) - G(r - h)) - (G(r + 2 * h) - G(r - 2 * h))) / (12 * h);
                INFO("n=" << n << " s=" << s << " eps=" << eps);
                CHECK(rel(green_radial_derivative(p, sh, r).total, fd) < 1e-6);
            }
}

TEST_CASE("Sommerfeld residual") {
    const Problem p = make_problem(3, 0.5, 1.0);
    CHECK(src_residual(p, 1e3) < src_residual(p, 1e2));
    // incoming sign: no cancellation on the Helmholtz part
    const SpectralShift sh = make_shift(p, 0.0);
    const double r = 200.0;
    const cplx u = green_eval(p, sh, r).total, du = green_radial_derivative(p, sh, r).total;
    const double incoming = r * std::abs(du + kI * u);
    CHECK(incoming == doctest::Approx(2.0 * r * std::abs(helm_part(3, 0.5, 1.0, r))).epsilon(0.05));
    // the 1D Helmholtz part radiates exactly
    const cplx h = helm_part(1, 0.3, 1.0, 3.0), dh = helm_part_derivative(1, 0.3, 1.0, 3.0);
    CHECK(std::abs(dh - kI * h) < 1e-15);
}

TEST_CASE("limiting absorption pointwise") {
    const Problem p = make_problem(2, 0.75, 1.0);
    const cplx g0 = green_eval(p, make_shift(p, 0.0), 1.0).total;
    double prev = 1e300;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const double d = std::abs(green_eval(p, make_shift(p, eps), 1.0).total - g0);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 1e-2);
}

TEST_CASE("domain errors") {
    const Problem p = make_problem(2, 0.5, 1.0);
    CHECK_THROWS_AS(green_eval(p, make_shift(p, 0.0), 0.0), DomainError);
    CHECK_THROWS_AS(green_eval(p, make_shift(p, 0.0), -1.0), DomainError);
    CHECK_THROWS_AS(green_closed_form_3d_half(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(make_shift(p, -0.1), DomainError);
}
