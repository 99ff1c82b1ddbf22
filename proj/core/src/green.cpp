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

#include "frachelm/green.hpp"

#include <algorithm>
#include <cmath>

#include "frachelm/specfun.hpp"

namespace frachelm {

namespace {

cplx cpow(cplx w, double a) { return std::exp(a * std::log(w)); }

// The tail integrals of the 1D and 3D formulas come from turning the half-line
// integrals of e^{+-i t r} onto rays in the upper/lower quarter planes. The
// default ray is the imaginary axis. When the pole k_eps sits near that
// axis (large eps, small s) the upper ray is tilted so the pole stays well
// clear of the path; if it ends up outside the sector, the residue (the
// Helmholtz part) is not picked up and is subtracted from the tail instead.
struct Ray {
    double theta;
    bool encloses_pole;
};

Ray choose_ray(cplx kc) {
    const double a = std::arg(kc);
    if (std::abs(a - kPi / 2.0) < 0.2) return {kPi / 2.0 - 0.45, false};
    return {kPi / 2.0, a < kPi / 2.0};
}

struct TailValue {
    cplx value{0.0, 0.0};
    double err = 0.0;
    double scale = 0.0;  // magnitude the quadrature tolerances were relative to
};

double y_cut_for(double feature) { return std::clamp(5.0 * feature, 10.0, 50.0); }

std::vector<double> y_breaks(double feature, double y_cut) {
    std::vector<double> b;
    for (double f : {0.25 * feature, feature, 4.0 * feature})
        if (f > 0.0 && f < y_cut) b.push_back(f);
    return b;
}

// 1D / 3D tail and its r-derivative.
TailValue ray_tail(const Problem& p, const SpectralShift& sh, double r, const QuadratureSpec& spec,
                   bool derivative) {
    const int n = p.n;
    const double s = p.s;
    const int m = (n == 3) ? p.regime().m : 0;
    const cplx K = sh.k_pow2s;
    const cplx kc = sh.k_eps;
    const Ray ray = choose_ray(kc);
    TailValue out;

    const double cs = std::cos(kPi * s);
    const cplx Km = std::pow(K, m);
    if (ray.theta == kPi / 2.0) {
        const double feature = std::abs(kc) * r;
        const double ycut = y_cut_for(feature);
        std::function<cplx(double)> f;
        if (n == 1) {
            const double c = std::sin(kPi * s) / (kPi * r);
            f = [=](double y) {
                const double u = y / r;
                const double u2s = std::pow(u, 2.0 * s);
                const cplx v = c * u2s / (u2s * u2s - 2.0 * u2s * K * cs + K * K);
                return derivative ? v * (-u) : v;
            };
        } else {
            const double s1 = std::sin(kPi * s * (m + 1)), s0 = std::sin(kPi * s * m);
            const cplx c = Km / (2.0 * kPi * kPi * r * r);
            f = [=](double y) {
                const double u = y / r;
                const double u2s = std::pow(u, 2.0 * s);
                const cplx v = c * std::pow(u, 1.0 - 2.0 * s * m) * (u2s * s1 - K * s0) /
                               (u2s * u2s - 2.0 * u2s * K * cs + K * K);
                return derivative ? v * (-u) : v;
            };
        }
        QuadResult q = integrate_exp_weighted(f, spec, ycut, y_breaks(feature, ycut));
        out.value = q.value;
        out.err = q.err_estimate;
        out.scale = std::abs(q.value);
        if (derivative && n == 3) {
            // d/dr of the 1/r prefactor
            QuadResult q0 = integrate_exp_weighted(
                [&](double y) {
                    const double u = y / r;
                    const double u2s = std::pow(u, 2.0 * s);
                    return Km / (2.0 * kPi * kPi * r * r) * std::pow(u, 1.0 - 2.0 * s * m) *
                           (u2s * std::sin(kPi * s * (m + 1)) - K * std::sin(kPi * s * m)) /
                           (u2s * u2s - 2.0 * u2s * K * cs + K * K);
                },
                spec, ycut, y_breaks(feature, ycut));
            out.value -= q0.value / r;
            out.err += q0.err_estimate / r;
            out.scale += std::abs(q0.value) / r;
        }
        return out;
    }

    // Tilted upper ray at angle theta, lower ray on the negative imaginary axis.
    const double th = ray.theta;
    const double sn = std::sin(th);
    const double cot = std::cos(th) / sn;
    const cplx eith = std::polar(1.0, th);
    auto h = [=](cplx t) {
        const cplx den = cpow(t, 2.0 * s) - K;
        return n == 1 ? 1.0 / den : cpow(t, 1.0 - 2.0 * s * m) / den;
    };
    auto upper = [=](double y, bool d) {
        const double u = y / (r * sn);
        cplx v = eith / (r * sn) * std::exp(kI * y * cot) * h(u * eith);
        return d ? v * (kI * eith * u) : v;
    };
    auto lower = [=](double y, bool d) {
        const double u = y / r;
        cplx v = -kI / r * h(cplx(0.0, -u));
        return d ? v * (-u) : v;
    };
    const double fu = std::abs(kc) * r * sn;
    const double fl = std::abs(kc) * r;
    const QuadResult U = integrate_exp_weighted([&](double y) { return upper(y, derivative); }, spec,
                                                y_cut_for(fu), y_breaks(fu, y_cut_for(fu)));
    const QuadResult L = integrate_exp_weighted([&](double y) { return lower(y, derivative); }, spec,
                                                y_cut_for(fl), y_breaks(fl, y_cut_for(fl)));
    if (n == 1) {
        out.value = (U.value + L.value) / (2.0 * kPi);
        out.err = (U.err_estimate + L.err_estimate) / (2.0 * kPi);
        out.scale = (std::abs(U.value) + std::abs(L.value)) / (2.0 * kPi);
    } else {
        const cplx pre = Km / (4.0 * kI * kPi * kPi * r);
        out.value = pre * (U.value - L.value);
        out.err = std::abs(pre) * (U.err_estimate + L.err_estimate);
        out.scale = std::abs(pre) * (std::abs(U.value) + std::abs(L.value));
        if (derivative) {
            const QuadResult U0 = integrate_exp_weighted([&](double y) { return upper(y, false); }, spec,
                                                         y_cut_for(fu), y_breaks(fu, y_cut_for(fu)));
            const QuadResult L0 = integrate_exp_weighted([&](double y) { return lower(y, false); }, spec,
                                                         y_cut_for(fl), y_breaks(fl, y_cut_for(fl)));
            out.value -= pre * (U0.value - L0.value) / r;
            out.err += std::abs(pre) * (U0.err_estimate + L0.err_estimate) / r;
            out.scale += std::abs(pre) * (std::abs(U0.value) + std::abs(L0.value)) / r;
        }
    }
    if (!ray.encloses_pole) {
        out.value -= derivative ? helm_part_derivative(n, s, kc, r) : helm_part(n, s, kc, r);
    }
    return out;
}

// `scale` is the magnitude of the closed-form parts; the tail only needs to be
// resolved relative to it. At large r the derivative tail sits ~12 digits
// below the integrand and a purely relative target is unreachable.
TailValue bessel_tail(const Problem& p, const SpectralShift& sh, double r, const QuadratureSpec& spec,
                      bool derivative, double scale) {
    const Regime reg = p.regime();
    const bool corrected = reg.branch == Branch::LowInteger;
    const double s = p.s;
    const cplx kc = sh.k_eps;
    const RadialKernel ker(kc, s, reg.m, corrected);
    std::vector<double> features{std::abs(kc)};
    if (kc.real() > 0.0) features.push_back(kc.real());
    TailValue out;
    if (corrected && reg.m == 1) {
        out.value = 0.0;  // F~ vanishes at s = 1/2
    } else if (!derivative) {
        QuadResult q = integrate_bessel_transform([&](double rho) { return rho * ker.value(rho); }, r, spec,
                                                  features);
        out.value = q.value / (2.0 * kPi);
        out.err = q.err_estimate / (2.0 * kPi);
    } else {
        QuadratureSpec loc = spec;
        loc.abs_tol = std::max(spec.abs_tol, 1e-3 * spec.rel_tol * scale * 2.0 * kPi * r);
        QuadResult q = integrate_bessel_transform(
            [&](double rho) { return rho * (rho * ker.derivative(rho) + 2.0 * ker.value(rho)); }, r, loc,
            features);
        out.value = -q.value / (2.0 * kPi * r);
        out.err = q.err_estimate / (2.0 * kPi * r);
    }
    if (corrected) {
        const cplx c = cpow(kc, 2.0 - 2.0 * s) / 4.0;
        if (!derivative) {
            out.value -= c * struve_k0(kc * r);
        } else {
            out.value -= c * kc * (2.0 / kPi - struve_k1(kc * r));
        }
        // asymptotic and integral Struve paths agree to ~1e-14
        out.err += 1e-13 * std::abs(c) * std::max(1.0, std::abs(out.value));
    }
    return out;
}

cplx riesz_part(const Problem& p, cplx K, double r, bool derivative) {
    const Regime reg = p.regime();
    if (p.n == 1 || reg.branch == Branch::High) return 0.0;
    cplx sum = 0.0;
    cplx Kj = 1.0;
    for (int j = 0; j < reg.m; ++j) {
        const double e = p.n - 2.0 * p.s * (j + 1);
        const cplx term = riesz_constant(p.n, p.s, j) * Kj / std::pow(r, e);
        sum += derivative ? -e * term / r : term;
        Kj *= K;
    }
    return sum;
}

GreenDecomposition assemble(const Problem& p, const SpectralShift& shift, double r, const QuadratureSpec& spec,
                            bool derivative) {
    p.validate();
    spec.validate();
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("green: r must be positive and finite");
    GreenDecomposition g;
    g.helm = derivative ? helm_part_derivative(p.n, p.s, shift.k_eps, r) : helm_part(p.n, p.s, shift.k_eps, r);
    g.riesz_sum = riesz_part(p, shift.k_pow2s, r, derivative);
    const TailValue t = (p.n == 2) ? bessel_tail(p, shift, r, spec, derivative, std::abs(g.helm + g.riesz_sum))
                                   : ray_tail(p, shift, r, spec, derivative);
    g.j_tail = t.value;
    g.total = g.helm + g.riesz_sum + g.j_tail;
    g.err_estimate = t.err;
    const double scale = std::max({std::abs(g.total), std::abs(g.helm) + std::abs(g.riesz_sum), t.scale});
    if (g.err_estimate > std::max(spec.abs_tol, spec.rel_tol * scale))
        throw AccuracyError("green: error estimate exceeds the requested tolerance", g.total, g.err_estimate);
    return g;
}

}  // namespace

QuadratureSpec default_green_spec() {
    QuadratureSpec q;
    q.rel_tol = 1e-9;
    return q;
}

QuadratureSpec default_derivative_spec() {
    QuadratureSpec q;
    q.rel_tol = 1e-7;
    return q;
}

GreenDecomposition green_eval(const Problem& p, const SpectralShift& shift, double r, const QuadratureSpec& spec) {
    return assemble(p, shift, r, spec, false);
}

GreenDecomposition green_radial_derivative(const Problem& p, const SpectralShift& shift, double r,
                                           const QuadratureSpec& spec) {
    return assemble(p, shift, r, spec, true);
}

cplx riesz_sum(const Problem& p, cplx k_pow2s, double r) { return riesz_part(p, k_pow2s, r, false); }

double src_residual(const Problem& p, double r, const QuadratureSpec& spec) {
    const SpectralShift sh = make_shift(p, 0.0);
    const cplx g = green_eval(p, sh, r, spec).total;
    const cplx dg = green_radial_derivative(p, sh, r, spec).total;
    return std::pow(r, 0.5 * (p.n - 1)) * std::abs(dg - kI * p.k * g);
}

cplx green_closed_form_3d_half(double k, double r) {
    if (!(k > 0.0) || !(r > 0.0)) throw DomainError("closed form: need k > 0 and r > 0");
    const cplx z = kI * k * r;
    const cplx e = std::exp(z);
    const cplx bracket = e * expint_e1(z) - std::conj(e) * expint_e1(-z);
    return 1.0 / (2.0 * kPi * kPi * r * r) - kI * k / (4.0 * kPi * kPi * r) * bracket + k * e / (2.0 * kPi * r);
}

cplx green_closed_form_3d_half_derivative(double k, double r) {
    if (!(k > 0.0) || !(r > 0.0)) throw DomainError("closed form: need k > 0 and r > 0");
    const cplx z = kI * k * r;
    const cplx e = std::exp(z);
    const cplx b = e * expint_e1(z) - std::conj(e) * expint_e1(-z);
    // d/dr [e^{ikr} E1(ikr)] = ik e^{ikr} E1(ikr) - 1/r; the -1/r cancels in the difference.
    const cplx db = kI * k * (e * expint_e1(z) + std::conj(e) * expint_e1(-z));
    const cplx c = -kI * k / (4.0 * kPi * kPi);
    return -1.0 / (kPi * kPi * r * r * r) + c * (db / r - b / (r * r)) +
           k / (2.0 * kPi) * e * (kI * k * r - 1.0) / (r * r);
}

}  // namespace frachelm
