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

#include "frachelm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "frachelm/specfun.hpp"

namespace frachelm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// QUADPACK qk21 abscissae and weights.
constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a, b;
    cplx value;
    double err;
    double resabs;
};

Panel gk21(const ComplexFn& f, double a, double b) {
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    cplx fv[21];
    fv[20] = f(centr);
    cplx resk = fv[20] * kWgk[10];
    cplx resg{0.0, 0.0};
    double resabs = std::abs(fv[20]) * kWgk[10];
    for (int j = 0; j < 10; ++j) {
        const double dx = hlgth * kXgk[j];
        const cplx f1 = f(centr - dx);
        const cplx f2 = f(centr + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const cplx mean = resk * 0.5;
    double resasc = kWgk[10] * std::abs(fv[20] - mean);
    for (int j = 0; j < 10; ++j)
        resasc += kWgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
    const double ah = std::abs(hlgth);
    resasc *= ah;
    resabs *= ah;
    double err = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
    if (!std::isfinite(err) || !std::isfinite(std::abs(resk))) err = std::numeric_limits<double>::infinity();
    return {a, b, resk * hlgth, err, resabs};
}

bool panel_less(const Panel& x, const Panel& y) { return x.err < y.err; }

}  // namespace

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("quadrature tolerances must be positive");
    if (max_subdiv < 4 || laguerre_order < 4 || bessel_intervals < 4)
        throw DomainError("quadrature orders must be at least 4");
}

namespace {

// noise_factor * eps * resabs is the floor below which the error target is
// not pursued; oscillatory callers raise it to the phase conditioning of
// their kernel (cos x or J0(x) carry ~ eps * x absolute error).
QuadResult adaptive_impl(const ComplexFn& f, double a, double b, const QuadratureSpec& spec,
                         const std::vector<double>& breakpoints, double noise_factor) {
    if (!(a < b)) throw DomainError("integrate_adaptive: need a < b");
    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Panel> heap;
    heap.reserve(cuts.size() + 64);
    QuadResult out;
    cplx total{0.0, 0.0};
    double err = 0.0;
    double resabs = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        heap.push_back(gk21(f, cuts[i], cuts[i + 1]));
        out.evaluations += 21;
        total += heap.back().value;
        err += heap.back().err;
        resabs += heap.back().resabs;
    }
    std::make_heap(heap.begin(), heap.end(), panel_less);
    auto tolerance = [&] {
        return std::max({spec.abs_tol, spec.rel_tol * std::abs(total), noise_factor * kEps * resabs});
    };
    long splits = 0;
    bool stuck = false;
    const long max_splits = std::max<long>(spec.max_subdiv, static_cast<long>(cuts.size()) * 4);
    while (err > tolerance() && !heap.empty()) {
        if (splits >= max_splits) {
            throw AccuracyError("integrate_adaptive: subdivision limit reached", total, err);
        }
        std::pop_heap(heap.begin(), heap.end(), panel_less);
        Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 1024.0 * kEps * std::max(std::abs(worst.a), std::abs(worst.b))) {
            // The worst panel cannot be refined; nothing left to gain.
            heap.push_back(worst);
            stuck = true;
            break;
        }
        Panel left = gk21(f, worst.a, mid);
        Panel right = gk21(f, mid, worst.b);
        out.evaluations += 42;
        ++splits;
        total += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        resabs += left.resabs + right.resabs - worst.resabs;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), panel_less);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), panel_less);
    }
    // Recompute sums from scratch to shed accumulated rounding in the running totals.
    total = 0.0;
    err = 0.0;
    resabs = 0.0;
    for (const Panel& p : heap) {
        total += p.value;
        err += p.err;
        resabs += p.resabs;
    }
    if (!std::isfinite(std::abs(total)))
        throw AccuracyError("integrate_adaptive: non-finite integrand", total, err);
    if (stuck && err > tolerance()) throw AccuracyError("integrate_adaptive: panels too narrow to refine", total, err);
    out.value = total;
    out.err_estimate = err;
    return out;
}

}  // namespace

QuadResult integrate_adaptive(const ComplexFn& f, double a, double b, const QuadratureSpec& spec,
                              const std::vector<double>& breakpoints) {
    return adaptive_impl(f, a, b, spec, breakpoints, 100.0);
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(order, 0.0);
    weights.assign(order, 0.0);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= order; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = order * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        nodes[i] = -z;
        nodes[order - 1 - i] = z;
        weights[i] = weights[order - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

void gauss_laguerre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    static std::mutex mu;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) {
        nodes = it->second.first;
        weights = it->second.second;
        return;
    }
    const int n = order;
    std::vector<double> x(n), w(n);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            z = 3.0 / (1.0 + 2.4 * n);
        } else if (i == 1) {
            z += 15.0 / (1.0 + 2.5 * n);
        } else {
            const double ai = i - 1;
            z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - x[i - 2]);
        }
        double pp = 0.0, p2 = 0.0;
        for (int iter = 0; iter < 200; ++iter) {
            double p1 = 1.0;
            p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
            }
            pp = (n * p1 - n * p2) / z;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, z)) break;
        }
        x[i] = z;
        w[i] = -1.0 / (pp * n * p2);
    }
    cache.emplace(order, std::make_pair(x, w));
    nodes = x;
    weights = w;
}

QuadResult integrate_exp_weighted(const ComplexFn& f, const QuadratureSpec& spec, double y_cut,
                                  const std::vector<double>& breakpoints) {
    spec.validate();
    if (!(y_cut > 0.0)) throw DomainError("integrate_exp_weighted: y_cut must be positive");
    auto weighted = [&](double y) { return std::exp(-y) * f(y); };
    QuadResult head = integrate_adaptive(weighted, 0.0, y_cut, spec, breakpoints);

    std::vector<double> x, w;
    gauss_laguerre(spec.laguerre_order, x, w);
    std::vector<double> xh, wh;
    gauss_laguerre(std::max(4, spec.laguerre_order / 2), xh, wh);
    cplx tail{0.0, 0.0}, tail_half{0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i)
        if (w[i] > 0.0) tail += w[i] * f(y_cut + x[i]);
    for (std::size_t i = 0; i < xh.size(); ++i)
        if (wh[i] > 0.0) tail_half += wh[i] * f(y_cut + xh[i]);
    const double scale = std::exp(-y_cut);
    QuadResult out;
    out.value = head.value + scale * tail;
    out.err_estimate = head.err_estimate + scale * std::abs(tail - tail_half);
    out.evaluations = head.evaluations + static_cast<long>(x.size() + xh.size());
    return out;
}

QuadResult integrate_partitioned(const ComplexFn& f, const std::function<double(long)>& zero,
                                 double head_end, const QuadratureSpec& spec,
                                 const std::vector<double>& breakpoints) {
    spec.validate();
    long l0 = 2;
    while (zero(l0) < head_end) ++l0;
    const double a0 = zero(l0);

    std::vector<double> cuts;
    const long max_zero_cuts = 200000;
    for (long l = 0; l < l0 && l < max_zero_cuts; ++l) cuts.push_back(zero(l));
    for (double p : breakpoints)
        if (p > 0.0 && p < a0) cuts.push_back(p);
    // Geometric cuts give the bisection a head start on long first lobes.
    if (zero(0) > 20.0 * (breakpoints.empty() ? 1.0 : *std::max_element(breakpoints.begin(), breakpoints.end()))) {
        double base = breakpoints.empty() ? 1.0 : *std::max_element(breakpoints.begin(), breakpoints.end());
        for (double p = 4.0 * base; p < zero(0); p *= 4.0) cuts.push_back(p);
    }
    // zeros sit ~pi apart in the kernel argument
    auto noise = [](long l) { return std::max(100.0, 10.0 * kPi * static_cast<double>(l + 1)); };
    QuadResult head = adaptive_impl(f, 0.0, a0, spec, cuts, noise(l0));

    const int n = spec.bessel_intervals;
    std::vector<cplx> terms(n);
    double term_err = 0.0;
    long evals = head.evaluations;
    QuadratureSpec term_spec = spec;
    term_spec.abs_tol = std::max(spec.abs_tol, 1e-3 * spec.rel_tol * std::abs(head.value) / n);
    for (int i = 0; i < n; ++i) {
        QuadResult t = adaptive_impl(f, zero(l0 + i), zero(l0 + i + 1), term_spec, {}, noise(l0 + i + 1));
        terms[i] = t.value;
        term_err += t.err_estimate;
        evals += t.evaluations;
    }
    // Tail terms must be shrinking by the end, otherwise the series is not
    // in its asymptotic alternating regime.
    const double late = std::abs(terms[n - 1]) + std::abs(terms[n - 2]);
    const double early = std::abs(terms[n - 3]) + std::abs(terms[n - 4]);
    auto apex = [](std::vector<cplx> t) {
        for (std::size_t len = t.size(); len > 1; --len)
            for (std::size_t i = 0; i + 1 < len; ++i) t[i] = 0.5 * (t[i] + t[i + 1]);
        return t[0];
    };
    std::vector<cplx> partial(n);
    cplx run{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        run += terms[i];
        partial[i] = run;
    }
    const cplx full = apex(partial);
    const cplx shorter = apex(std::vector<cplx>(partial.begin(), partial.end() - 1));
    const cplx shifted = apex(std::vector<cplx>(partial.begin() + 1, partial.end()));
    const double extrap_err = std::max(std::abs(full - shorter), std::abs(full - shifted));

    QuadResult out;
    out.value = head.value + full;
    out.err_estimate = head.err_estimate + term_err + extrap_err;
    out.evaluations = evals;
    if (late > early * 1.001 + 1e-300) {
        throw AccuracyError("integrate_partitioned: tail terms are not decreasing", out.value,
                            out.err_estimate + late);
    }
    return out;
}

double bessel_j0_zero(long l) {
    thread_local std::vector<double> cache;
    if (l < static_cast<long>(cache.size())) return cache[l];
    if (l >= 100000) {
        const double beta = (l + 0.75) * kPi;
        const double b8 = 8.0 * beta;
        return beta + 1.0 / b8 - 124.0 / (3.0 * b8 * b8 * b8);
    }
    while (static_cast<long>(cache.size()) <= l) {
        const long i = static_cast<long>(cache.size());
        const double beta = (i + 0.75) * kPi;
        const double b8 = 8.0 * beta;
        const double b2 = b8 * b8;
        double x = beta + 1.0 / b8 - 124.0 / (3.0 * b8 * b2) + 120928.0 / (15.0 * b8 * b2 * b2);
        if (i < 64) {
            for (int it = 0; it < 6; ++it) {
                const double dx = bessel_j0(x) / bessel_j1(x);
                x += dx;
                if (std::abs(dx) < 1e-16 * x) break;
            }
        }
        cache.push_back(x);
    }
    return cache[l];
}

QuadResult integrate_bessel_transform(const ComplexFn& g, double r, const QuadratureSpec& spec,
                                      const std::vector<double>& features) {
    if (!(r > 0.0)) throw DomainError("integrate_bessel_transform: r must be positive");
    double fmax = 0.0;
    for (double x : features) fmax = std::max(fmax, x);
    auto integrand = [&](double rho) { return bessel_j0(rho * r) * g(rho); };
    auto zero = [r](long l) { return bessel_j0_zero(l) / r; };
    return integrate_partitioned(integrand, zero, 3.0 * fmax, spec, features);
}

}  // namespace frachelm
