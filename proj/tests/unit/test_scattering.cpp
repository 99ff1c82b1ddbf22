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

#include "frachelm/quadrature.hpp"
#include "frachelm/scattering.hpp"
#include "reference_values.hpp"

using namespace frachelm;

namespace {
const Point kLo{-0.5, -0.5, -0.5}, kHi{0.5, 0.5, 0.5};

PotentialGrid constant_grid(int dim, int cells, double q) {
    return make_potential_grid(dim, kLo, kHi, cells, [q](const Point&) { return q; });
}

double norm_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}
}  // namespace

TEST_CASE("potential grid") {
    const PotentialGrid g = constant_grid(2, 4, 0.3);
    CHECK(g.size() == 16);
    CHECK(g.cell_volume == doctest::Approx(1.0 / 16));
    CHECK(g.q_sup == 0.3);
    CHECK(g.nodes[1][0] == doctest::Approx(-0.125));
    CHECK(g.nodes[4][1] == doctest::Approx(-0.125));
    CHECK_THROWS_AS(make_potential_grid(2, kLo, kLo, 4, std::vector<double>(16, 0.0)), DomainError);
    CHECK_THROWS_AS(make_potential_grid(2, kLo, kHi, 4, std::vector<double>(15, 0.0)), DomainError);
    CHECK_THROWS_AS(make_plane_wave(2, {0, 0, 0}), DomainError);
}

TEST_CASE("Phi for 3D s = 1/2 against mpmath") {
    const Problem p = make_problem(3, 0.5, 1.0);
    const RadialKernelTable T(p, 1e-6, 2.5);
    for (const auto& c : ref::kPhi3Half) {
        CHECK(std::abs(T.phi_direct(c.R) - c.phi) < 1e-10 * std::abs(c.phi));
        CHECK(std::abs(T.phi(c.R) - c.phi) < 1e-10 * std::abs(c.phi));
    }
}

TEST_CASE("kernel table interpolation") {
    for (int n = 1; n <= 3; ++n)
        for (double s : {0.3, 0.75}) {
            const Problem p = make_problem(n, s, 1.0);
            const RadialKernelTable T(p, 1e-3, 2.0);
            const SpectralShift sh = make_shift(p, 0.0);
            for (double r : {0.0123, 0.3217, 1.777}) {
                const cplx g = green_eval(p, sh, r).total;
                CHECK(std::abs(T.value(r) - g) < 1e-9 * std::abs(g));
            }
        }
}

TEST_CASE("cell integral against tensor Gauss away from the cell") {
    const Problem p = make_problem(2, 0.75, 1.0);
    const RadialKernelTable T(p, 1e-6, 3.0);
    const Point c{0.3, -0.2, 0}, h{0.1, 0.1, 0}, x{0.0, 0.0, 0};
    std::vector<double> gx, gw;
    gauss_legendre(20, gx, gw);
    cplx ref = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i)
        for (std::size_t j = 0; j < gx.size(); ++j) {
            const double y0 = c[0] + 0.5 * h[0] * gx[i], y1 = c[1] + 0.5 * h[1] * gx[j];
            ref += 0.25 * h[0] * h[1] * gw[i] * gw[j] * T.value(std::hypot(y0 - x[0], y1 - x[1]));
        }
    CHECK(std::abs(cell_integral(T, c, h, x) - ref) < 1e-11 * std::abs(ref));
}

TEST_CASE("self-cell integral converges in the local panels") {
    const Problem p = make_problem(2, 0.75, 1.0);
    const RadialKernelTable T(p, 1e-8, 1.0);
    const Point c{0, 0, 0}, h{1.0 / 16, 1.0 / 16, 0};
    const cplx a = cell_integral(T, c, h, c, 2), b = cell_integral(T, c, h, c, 4);
    CHECK(std::abs(a - b) < 1e-6 * std::abs(b));
}

TEST_CASE("zero potential gives the identity") {
    const Problem p = make_problem(2, 0.5, 1.0);
    const NystromSystem sys = build_nystrom(p, constant_grid(2, 4, 0.0));
    for (std::size_t i = 0; i < sys.size; ++i)
        for (std::size_t j = 0; j < sys.size; ++j) CHECK(sys.at(i, j) == cplx(i == j ? 1.0 : 0.0, 0.0));
    const IncidentField inc = make_plane_wave(2, {1, 1, 0});
    const ScatterSolution sol = solve_ls(sys, inc);
    for (std::size_t i = 0; i < sys.size; ++i) CHECK(sol.u_total[i] == inc.value(sys.grid->nodes[i], 1.0));
    CHECK(sol.residual <= 1e-12);
    CHECK(eval_scattered(sol, {2.0, 0.3, 0}) == cplx(0.0, 0.0));
    CHECK(born_approx(sys, inc, {0.1, 0.1, 0}) == cplx(0.0, 0.0));
    const auto scan = resonance_scan(p, *sys.grid, {0.5, 1.0});
    for (const auto& smp : scan) CHECK(smp.sigma_min == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("matrix symmetry pattern") {
    const Problem p = make_problem(2, 0.75, 1.0);
    std::vector<double> q(16);
    for (int i = 0; i < 16; ++i) q[i] = 0.1 + 0.02 * i;
    const NystromSystem sys = build_nystrom(p, make_potential_grid(2, kLo, kHi, 4, q));
    double worst = 0;
    for (std::size_t i = 0; i < sys.size; ++i)
        for (std::size_t j = 0; j < sys.size; ++j) {
            const cplx a = (sys.at(i, j) - (i == j ? 1.0 : 0.0)) / q[j];
            const cplx b = (sys.at(j, i) - (i == j ? 1.0 : 0.0)) / q[i];
            worst = std::max(worst, std::abs(a - b) / std::abs(a));
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("Neumann series and Born approximation") {
    const Problem p = make_problem(2, 0.75, 1.0);
    const IncidentField inc = make_plane_wave(2, {1, 0, 0});
    const NystromSystem sys = build_nystrom(p, constant_grid(2, 8, 0.05));
    const ScatterSolution sol = solve_ls(sys, inc);
    CHECK(norm_diff(neumann_series(sys, inc, 10), sol.u_total) < 1e-6);
    // homogeneous in q
    const NystromSystem sys2 = build_nystrom(p, constant_grid(2, 8, 0.1));
    const Point x{1.5, 0.2, 0};
    CHECK(std::abs(born_approx(sys2, inc, x) - 2.0 * born_approx(sys, inc, x)) < 1e-13);
    // linear in the solved field
    ScatterSolution twice = sol;
    for (auto& u : twice.u_total) u *= 2.0;
    CHECK(std::abs(eval_scattered(twice, x) - 2.0 * eval_scattered(sol, x)) < 1e-14);
}

TEST_CASE("scattered field radiates") {
    const Problem p = make_problem(2, 0.75, 1.0);
    const IncidentField inc = make_plane_wave(2, {1, 0, 0});
    const ScatterSolution sol = solve_ls(build_nystrom(p, constant_grid(2, 6, 0.2)), inc);
    double prev = 1e300;
    for (double r : {50.0, 100.0, 200.0}) {
        const Point x{r * std::cos(0.4), r * std::sin(0.4), 0};
        const FieldGradient f = eval_scattered_gradient(sol, x);
        const cplx ur = (f.grad[0] * x[0] + f.grad[1] * x[1]) / r;
        const double res = std::sqrt(r) * std::abs(ur - kI * f.value);
        CHECK(res < prev);
        prev = res;
    }
}

TEST_CASE("indicator is continuous in k") {
    const Problem p = make_problem(1, 0.6, 1.0);
    const PotentialGrid g = make_potential_grid(1, kLo, kHi, 16, [](const Point&) { return 0.5; });
    const auto scan = resonance_scan(p, g, {1.0, 1.01, 1.02});
    CHECK(std::abs(scan[1].sigma_min - scan[0].sigma_min) < 0.05);
    CHECK(std::abs(scan[2].sigma_min - 2 * scan[1].sigma_min + scan[0].sigma_min) <
          0.2 * std::abs(scan[1].sigma_min - scan[0].sigma_min) + 1e-6);
}
