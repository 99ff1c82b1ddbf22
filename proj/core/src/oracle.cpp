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

#include "frachelm/oracle.hpp"

#include <cmath>

#include "frachelm/green.hpp"
#include "frachelm/specfun.hpp"

namespace frachelm {

namespace {

struct Inversion {
    std::function<cplx(double)> integrand;  // includes the oscillatory factor and prefactor
    std::function<double(long)> zero;
    std::vector<double> features;
    cplx addback{0.0, 0.0};
};

Inversion setup(const Problem& p, const SpectralShift& sh, double r) {
    p.validate();
    if (!(sh.epsilon > 0.0)) throw DomainError("fourier_invert: requires eps > 0");
    if (!(r > 0.0)) throw DomainError("fourier_invert: r must be positive");
    const double s = p.s;
    const cplx K = sh.k_pow2s;
    const Regime reg = p.regime();
    // Riesz subtraction: 1/(x - K) - sum_{j<m} K^j / x^{j+1} = K^m / (x^m (x - K)), x = xi^{2s}.
    const int m = (p.n >= 2 && reg.branch != Branch::High) ? reg.m : 0;
    const cplx Km = std::pow(K, m);
    auto h = [=](double xi) {
        const double x = std::pow(xi, 2.0 * s);
        return Km / (std::pow(x, m) * (x - K));
    };
    Inversion inv;
    inv.features = {std::abs(sh.k_eps)};
    if (sh.k_eps.real() > 0.0) inv.features.push_back(sh.k_eps.real());
    switch (p.n) {
        case 1:
            inv.integrand = [=](double xi) { return std::cos(xi * r) * h(xi) / kPi; };
            inv.zero = [=](long l) { return (l + 0.5) * kPi / r; };
            break;
        case 2:
            inv.integrand = [=](double xi) { return bessel_j0(xi * r) * xi * h(xi) / (2.0 * kPi); };
            inv.zero = [=](long l) { return bessel_j0_zero(l) / r; };
            break;
        case 3:
            inv.integrand = [=](double xi) { return xi * std::sin(xi * r) * h(xi) / (2.0 * kPi * kPi * r); };
            inv.zero = [=](long l) { return (l + 1.0) * kPi / r; };
            break;
        default: throw DomainError("fourier_invert: dimension must be 1, 2 or 3");
    }
    if (m > 0) inv.addback = riesz_sum(p, K, r);
    return inv;
}

}  // namespace

QuadratureSpec default_oracle_spec() {
    QuadratureSpec q;
    q.rel_tol = 1e-11;
    q.bessel_intervals = 40;
    return q;
}

QuadResult fourier_invert(const Problem& p, const SpectralShift& shift, double r, const QuadratureSpec& spec) {
    const Inversion inv = setup(p, shift, r);
    double fmax = 0.0;
    for (double f : inv.features) fmax = std::max(fmax, f);
    QuadResult q = integrate_partitioned(inv.integrand, inv.zero, 3.0 * fmax, spec, inv.features);
    q.value += inv.addback;
    return q;
}

TruncatedInversion fourier_invert_truncated(const Problem& p, const SpectralShift& shift, double r,
                                            double xi_max, const QuadratureSpec& spec) {
    const Inversion inv = setup(p, shift, r);
    long l = 0;
    while (inv.zero(l) < xi_max) ++l;
    std::vector<double> cuts = inv.features;
    for (long i = 0; i < l; ++i) cuts.push_back(inv.zero(i));
    TruncatedInversion out;
    out.cutoff = inv.zero(l);
    QuadResult q = integrate_adaptive(inv.integrand, 0.0, out.cutoff, spec, cuts);
    out.value = q.value + inv.addback;
    out.err_estimate = q.err_estimate;
    out.tail_bound = std::abs(integrate_adaptive(inv.integrand, inv.zero(l), inv.zero(l + 1), spec).value);
    return out;
}

}  // namespace frachelm
