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

// Acceptance suite: one PASS/FAIL line per criterion. Pass --verbose for the
// per-case numbers. Exit status is 0 when every failing sub-check is on the
// known list below (see README, "Acceptance suite").

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstdlib>
#include <cstring>
#include <algorithm>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "frachelm/diagnostics.hpp"
#include "frachelm/oracle.hpp"
#include "frachelm/specfun.hpp"

using namespace frachelm;

namespace {

bool verbose = false;
int hard_failures = 0;

#define DETAIL(...)                          \
    do {                                     \
        if (verbose) std::printf(__VA_ARGS__); \
    } while (0)

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, bool pass, bool known, const std::string& what) {
    const char* tag = pass ? "PASS" : "FAIL";
    std::printf("[%s] %d %s%s\n", tag, id, what.c_str(), !pass && known ? " (known, see README)" : "");
    std::fflush(stdout);
    if (!pass && !known) ++hard_failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

const double kOrders[] = {0.25, 0.3, 0.5, 0.75};

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    int failed = 0, cases = 0;
    for (int n = 1; n <= 3; ++n)
        for (double s : kOrders)
            for (double eps : {0.3, 1.0})
                for (double r : {0.5, 1.0, 2.0, 5.0}) {
                    ++cases;
                    const Problem p = make_problem(n, s, 1.0);
                    const SpectralShift sh = make_shift(p, eps);
                    try {
                        const cplx g = green_eval(p, sh, r).total;
                        const cplx o = fourier_invert(p, sh, r).value;
                        const double rel = std::abs(g - o) / std::abs(g);
                        worst = std::max(worst, rel);
                        DETAIL("    n=%d s=%.2f eps=%.1f r=%.1f rel=%.2e\n", n, s, eps, r, rel);
                    } catch (const std::exception& e) {
                        ++failed;
                        DETAIL("    n=%d s=%.2f eps=%.1f r=%.1f error: %s\n", n, s, eps, r, e.what());
                    }
                }
    const double t = seconds_since(t0);
    report(1, failed == 0 && worst <= 1e-5 && t <= 120.0, false,
           fmt("dual-path Green agreement: worst rel %.2e over %d cases (tol 1e-5), %d errors, %.1f s (limit 120 s)",
               worst, cases, failed, t));
}

void criterion2() {
    double worst = 0.0;
    for (double k : {0.5, 1.0, 2.0}) {
        const Problem p = make_problem(3, 0.5, k);
        const SpectralShift sh = make_shift(p, 0.0);
        for (double r : {0.1, 1.0, 10.0}) {
            const cplx c = green_closed_form_3d_half(k, r);
            const double rel = std::abs(green_eval(p, sh, r).total - c) / std::abs(c);
            worst = std::max(worst, rel);
            DETAIL("    k=%.1f r=%.1f rel=%.2e\n", k, r, rel);
        }
    }
    report(2, worst <= 1e-8, false, fmt("3D s=1/2 closed form: worst rel %.2e over 9 cases (tol 1e-8)", worst));
}

void criterion3() {
    // 10 orders x 10 wavenumbers x 10 frequencies
    double worst = 0.0;
    int points = 0;
    for (int is = 0; is < 10; ++is) {
        const double s = 0.05 + 0.1 * is;
        for (int iz = 0; iz < 10; ++iz) {
            const cplx z = std::polar(0.3 + 0.35 * iz, 0.15 * iz);
            for (int ix = 0; ix < 10; ++ix) {
                const double xi = 0.01 * std::pow(1e4, ix / 9.0);
                if (std::abs(xi - std::abs(z)) < 2e-3 * std::abs(z)) continue;
                ++points;
                const cplx lhs = (std::pow(xi, 2 * s) - std::pow(z, 2 * s)) *
                                 (std::pow(xi, 2 - 2 * s) + std::pow(z, 2 - 2 * s) + multiplier_M(xi, z, s));
                const cplx rhs = xi * xi - z * z;
                worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
            }
        }
    }
    double half = 0.0;
    for (double xi = 0.01; xi < 100; xi *= 1.3)
        for (cplx z : {cplx(1, 0), cplx(0.5, 0.5), cplx(2, 0.1)})
            half = std::max(half, std::abs(multiplier_M(xi, z, 0.5)) / std::max(1.0, xi));
    double lim = 0.0;
    for (double s : {0.2, 0.3, 0.6, 0.75, 0.9})
        for (double k : {0.5, 1.0, 2.0}) {
            const double expect = (1 - 2 * s) * std::pow(k, 2 - 2 * s) / s;
            lim = std::max(lim, std::abs(multiplier_M(k, k, s) - expect));
        }
    DETAIL("    identity points %d\n", points);
    report(3, worst <= 1e-12 && half <= 1e-14 && lim <= 1e-6, false,
           fmt("multiplier: factorization residual %.2e on %d points (tol 1e-12), |M| at s=1/2 %.1e, limit error %.1e (tol 1e-6)",
               worst, points, half, lim));
}

// Negative controls that cannot fail because the true behaviour is better than the
// proven bound by more than one power over the window: (n, 100 s, toward_zero).
const std::set<std::tuple<int, int, bool>> kSlackControls = {
    {2, 75, false}, {2, 30, false}, {2, 75, true}, {2, 50, true},
    {2, 25, true},  {3, 50, true},  {3, 30, true}, {3, 25, true},
};

void criterion4() {
    const auto t0 = std::chrono::steady_clock::now();
    int rate_fail = 0, control_fail = 0, control_known = 0;
    for (int n = 1; n <= 3; ++n)
        for (double s : kOrders) {
            const Problem p = make_problem(n, s, 1.0);
            for (bool zero : {false, true}) {
                const ClaimedRate c = theorem_rate(p, zero);
                RateFit fit, ctl;
                if (zero) {
                    fit = singularity_rate_check(p, FieldPart::JTail, 1e-3, 0.5, c.rate, c.log_weight);
                    ctl = singularity_rate_check(p, FieldPart::JTail, 1e-3, 0.5, c.log_weight ? -1.0 : c.rate - 1.0);
                } else {
                    fit = decay_rate_check(p, FieldPart::JTail, 10, 1e4, c.rate);
                    ctl = decay_rate_check(p, FieldPart::JTail, 10, 1e4, c.rate + 1.0);
                }
                if (!fit.envelope_bounded) ++rate_fail;
                if (ctl.envelope_bounded) {
                    if (kSlackControls.count({n, static_cast<int>(std::lround(100 * s)), zero}))
                        ++control_known;
                    else
                        ++control_fail;
                }
                DETAIL("    n=%d s=%.2f %s rate=%s%.2f bounded=%d (ratio %.3g, slope %.2f) control %.2f bounded=%d (ratio %.3g)\n",
                       n, s, zero ? "zero    " : "infinity", c.log_weight ? "log " : "", c.rate, fit.envelope_bounded,
                       fit.envelope_ratio, fit.slope, ctl.claimed_rate, ctl.envelope_bounded, ctl.envelope_ratio);
            }
        }
    const bool pass = rate_fail == 0 && control_fail == 0 && control_known == 0;
    const bool known = rate_fail == 0 && control_fail == 0;
    report(4, pass, known,
           fmt("asymptotic envelopes: %d/24 proven-rate checks bounded; negative controls rejected %d/24, "
               "%d still bounded where the true rate beats the bound, %.1f s",
               24 - rate_fail, 24 - control_fail - control_known, control_known, seconds_since(t0)));
}

void criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    int monotone_fail = 0, verdict_fail = 0, disagree = 0, fields = 0;
    RadiationOptions base;
    base.R0 = 10;
    base.R_max = 10240;
    auto classify = [&](int dim, const PointField& f, bool expect, const char* name, double s) {
        RadiationOptions o = base;
        o.dim = dim;
        o.angular = dim == 1 ? 2 : 16;
        o.polar = 8;
        o.radial_order = 8;
        o.radial_split = 2;
        const RadiationReport r = radiation_classify(f, o);
        ++fields;
        if (r.verdict_src != r.verdict_gsrc) ++disagree;
        if (r.verdict_src != expect || r.verdict_gsrc != expect) ++verdict_fail;
        DETAIL("    %s n=%d s=%.2f src=%d gsrc=%d\n", name, dim, s, r.verdict_src, r.verdict_gsrc);
    };
    for (int n = 1; n <= 3; ++n)
        for (double s : kOrders) {
            const Problem p = make_problem(n, s, 1.0);
            double prev = INFINITY;
            for (double r : {1e2, 1e3, 1e4}) {
                const double v = src_residual(p, r);
                if (!(v < prev)) ++monotone_fail;
                prev = v;
            }
            const SpectralShift sh = make_shift(p, 0.0);
            classify(n, radial_field(n, [=](double r) {
                         return std::pair<cplx, cplx>(green_eval(p, sh, r).total, green_radial_derivative(p, sh, r).total);
                     }),
                     true, "G", s);
        }
    classify(2, radial_field(2, [](double r) { return std::pair<cplx, cplx>(hankel1_0(r), -hankel1_1(r)); }), true,
             "H0(1)", 0);
    classify(2, radial_field(2, [](double r) {
                 return std::pair<cplx, cplx>(std::conj(hankel1_0(r)), -std::conj(hankel1_1(r)));
             }),
             false, "H0(2)", 0);
    report(5, monotone_fail == 0 && verdict_fail == 0 && disagree == 0, false,
           fmt("radiation: SRC residual decreasing for %d/12 regime samples; %d/%d fields classified as expected; "
               "%d SRC/GSRC disagreements, %.1f s",
               12 - monotone_fail, fields - verdict_fail, fields, disagree, seconds_since(t0)));
}

void criterion6() {
    double lo = INFINITY, hi = -INFINITY;
    int errors = 0;
    for (auto [n, s] : {std::pair{1, 0.3}, std::pair{3, 0.75}, std::pair{2, 0.25}, std::pair{1, 0.5}})
        for (double r : {1.0, 2.0}) {
            try {
                const LapFit f = lap_slope(make_problem(n, s, 1.0), r, {1e-1, 1e-2, 1e-3});
                lo = std::min(lo, f.slope);
                hi = std::max(hi, f.slope);
                DETAIL("    n=%d s=%.2f r=%.0f slope %.4f\n", n, s, r, f.slope);
            } catch (const std::exception& e) {
                ++errors;
                DETAIL("    n=%d s=%.2f r=%.0f error %s\n", n, s, r, e.what());
            }
        }
    report(6, errors == 0 && lo >= 0.8 && hi <= 1.2, false,
           fmt("limiting absorption: slopes in [%.3f, %.3f] over 8 fits (want [0.8, 1.2]), %d errors", lo, hi, errors));
}

double norm_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

void criterion7() {
    const auto t0 = std::chrono::steady_clock::now();
    const Problem p = make_problem(2, 0.75, 1.0);
    const IncidentField inc = make_plane_wave(2, {1, 0, 0});
    const Point lo{-0.5, -0.5, 0}, hi{0.5, 0.5, 0};
    auto grid = [&](int cells, double q) { return make_potential_grid(2, lo, hi, cells, [q](const Point&) { return q; }); };

    // q = 0
    const NystromSystem zero = build_nystrom(p, grid(32, 0.0));
    const ScatterSolution z = solve_ls(zero, inc);
    double dev = 0;
    for (std::size_t i = 0; i < z.u_total.size(); ++i)
        dev = std::max(dev, std::abs(z.u_total[i] - inc.value(zero.grid->nodes[i], 1.0)));
    const bool zero_ok = z.residual <= 1e-12 && dev == 0.0;

    // second-order Born error under contrast halving
    double err[2];
    const auto tb = std::chrono::steady_clock::now();
    for (int c = 0; c < 2; ++c) {
        const NystromSystem sys = build_nystrom(p, grid(32, c == 0 ? 0.2 : 0.1));
        const ScatterSolution sol = solve_ls(sys, inc);
        err[c] = norm_diff(sol.u_total, neumann_series(sys, inc, 2));
    }
    const double born_time = seconds_since(tb);
    const double ratio = err[0] / err[1];

    // grid refinement at an interior point
    const Point x{0.1, 0.2, 0};
    std::vector<cplx> u;
    for (int cells : {8, 16, 32}) {
        const ScatterSolution sol = solve_ls(build_nystrom(p, grid(cells, 0.2)), inc);
        u.push_back(inc.value(x, 1.0) + eval_scattered(sol, x));
    }
    const double d1 = std::abs(u[1] - u[0]), d2 = std::abs(u[2] - u[1]);
    DETAIL("    q=0 residual %.1e max|u-u_inc| %.1e; Born errors %.4e %.4e; Cauchy %.3e %.3e\n", z.residual, dev, err[0],
           err[1], d1, d2);
    report(7, zero_ok && ratio >= 2.8 && ratio <= 5.2 && born_time <= 60.0 && d2 < d1, false,
           fmt("Lippmann-Schwinger: q=0 residual %.1e; Born ratio %.3f (want [2.8, 5.2]) in %.1f s; "
               "Cauchy differences %.2e > %.2e; total %.1f s",
               z.residual, ratio, born_time, d1, d2, seconds_since(t0)));
}

void criterion8() {
    const auto t0 = std::chrono::steady_clock::now();
    const Problem p = make_problem(2, 0.75, 1.0);
    std::vector<double> ks;
    for (int i = 0; i < 20; ++i) ks.push_back(0.5 + 1.5 * i / 19.0);
    const double q = 0.1 / std::pow(ks.back(), 1.5);  // k^{2s} q <= 0.1 over the scan
    const PotentialGrid g =
        make_potential_grid(2, {-0.5, -0.5, 0}, {0.5, 0.5, 0}, 16, [q](const Point&) { return q; });
    double lo = INFINITY;
    for (const auto& smp : resonance_scan(p, g, ks)) {
        lo = std::min(lo, smp.sigma_min);
        DETAIL("    k=%.3f sigma_min %.5f rcond %.4f\n", smp.k, smp.sigma_min, smp.rcond);
    }
    report(8, lo >= 0.5, false,
           fmt("small-coupling invertibility: min indicator %.4f over 20 k in [0.5, 2] (want >= 0.5), %.1f s", lo,
               seconds_since(t0)));
}

void criterion9() {
    const double d = std::abs(riesz_constant(3, 0.5, 0) - 1.0 / (2.0 * kPi * kPi));
    report(9, d <= 1e-13, false, fmt("Riesz constant anchor: |c(3,1/2,0) - 1/(2 pi^2)| = %.1e (tol 1e-13)", d));
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--verbose") || !std::strcmp(argv[i], "-v"))
            verbose = true;
        else
            only.push_back(std::atoi(argv[i]));
    }
    void (*const criteria[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                  criterion6, criterion7, criterion8, criterion9};
    for (int i = 1; i <= 9; ++i) {
        if (!only.empty() && std::find(only.begin(), only.end(), i) == only.end()) continue;
        try {
            criteria[i - 1]();
        } catch (const std::exception& e) {
            report(i, false, false, std::string("threw: ") + e.what());
        }
    }
    return hard_failures == 0 ? 0 : 1;
}
