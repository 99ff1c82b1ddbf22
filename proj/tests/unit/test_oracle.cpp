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
#include "frachelm/oracle.hpp"
#include "reference_values.hpp"

using namespace frachelm;

TEST_CASE("oracle against mpmath inversion") {
    for (const auto& c : ref::kGreen) {
        const Problem p = make_problem(c.n, c.s, c.k);
        const QuadResult o = fourier_invert(p, make_shift(p, c.eps), c.r);
        INFO("n=" << c.n << " s=" << c.s);
        CHECK(std::abs(o.value - c.g) / std::abs(c.g) < 1e-8);
    }
}

TEST_CASE("oracle agrees with the contour formulas") {
    for (int n = 1; n <= 3; ++n)
        for (double s : {0.3, 0.75}) {
            const Problem p = make_problem(n, s, 1.0);
            const SpectralShift sh = make_shift(p, 0.5);
            const cplx g = green_eval(p, sh, 1.0).total;
            const QuadResult o = fourier_invert(p, sh, 1.0);
            CHECK(std::abs(g - o.value) / std::abs(g) < 1e-6);
        }
}

TEST_CASE("oracle refuses real k") {
    const Problem p = make_problem(1, 0.75, 1.0);
    CHECK_THROWS_AS(fourier_invert(p, make_shift(p, 0.0), 1.0), DomainError);
}

TEST_CASE("large absorption: truncated inversion plus tail bound") {
    const Problem p = make_problem(1, 0.75, 1.0);
    const SpectralShift sh = make_shift(p, 5.0);
    const QuadResult full = fourier_invert(p, sh, 1.0);
    const TruncatedInversion t = fourier_invert_truncated(p, sh, 1.0, 200.0);
    CHECK(std::abs(full.value - t.value) <= 2.0 * (full.err_estimate + t.err_estimate + t.tail_bound));
}

TEST_CASE("oracle stable when acceleration depth doubles") {
    const Problem p = make_problem(2, 0.3, 1.0);
    const SpectralShift sh = make_shift(p, 0.3);
    QuadratureSpec a = default_oracle_spec(), b = a;
    b.bessel_intervals *= 2;
    const QuadResult x = fourier_invert(p, sh, 2.0, a), y = fourier_invert(p, sh, 2.0, b);
    CHECK(std::abs(x.value - y.value) <= x.err_estimate + y.err_estimate + 1e-13 * std::abs(x.value));
}
