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

#include "frachelm/kernels.hpp"

#include <cmath>
#include <functional>

#include "frachelm/specfun.hpp"

namespace frachelm {

namespace {

cplx cpow(cplx w, double a) {
    if (w == cplx(0.0, 0.0)) return 0.0;
    return std::exp(a * std::log(w));
}

bool integer_branch(double s, int m) { return m >= 1 && std::abs(2.0 * s * m - 1.0) <= 1e-9; }

// Taylor coefficients a_j of an analytic function around c from the
// trapezoid rule on a circle of radius rad.
template <std::size_t N>
void cauchy_taylor(const std::function<cplx(cplx)>& fn, cplx c, double rad, std::array<cplx, N>& a) {
    constexpr int kPoints = 32;
    a.fill(0.0);
    for (int l = 0; l < kPoints; ++l) {
        const cplx w = std::polar(1.0, 2.0 * kPi * l / kPoints);
        const cplx fv = fn(c + rad * w);
        cplx wpow = 1.0;
        for (std::size_t j = 0; j < N; ++j) {
            a[j] += fv / wpow;
            wpow *= w;
        }
    }
    double scale = 1.0;
    for (std::size_t j = 0; j < N; ++j) {
        a[j] /= (kPoints * scale);
        scale *= rad;
    }
}

}  // namespace

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::High: return "high";
        case Branch::LowGeneric: return "low_generic";
        case Branch::LowInteger: return "low_integer";
    }
    return "unknown";
}

Regime classify_regime(double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("classify_regime: order s must lie in (0, 1)");
    const double x = 1.0 / (2.0 * s);
    const double nearest = std::round(x);
    if (nearest >= 1.0 && std::abs(s - 0.5 / nearest) <= kRegimeSnapTol)
        return {Branch::LowInteger, static_cast<int>(nearest)};
    if (x < 1.0) return {Branch::High, 0};
    return {Branch::LowGeneric, static_cast<int>(std::floor(x))};
}

double snap_order(double s) {
    const Regime reg = classify_regime(s);
    if (reg.branch == Branch::LowInteger) return 1.0 / (2.0 * reg.m);
    return s;
}

void Problem::validate() const {
    if (n < 1 || n > 3) throw DomainError("problem: dimension must be 1, 2 or 3");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("problem: order s must lie in (0, 1)");
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("problem: wavenumber k must be positive");
}

Problem make_problem(int n, double s, double k) {
    Problem p{n, s, k};
    p.validate();
    p.s = snap_order(s);
    return p;
}

SpectralShift make_shift(const Problem& p, double epsilon) {
    p.validate();
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("shift: epsilon must be >= 0");
    SpectralShift sh;
    sh.epsilon = epsilon;
    const double k2s = std::pow(p.k, 2.0 * p.s);
    sh.k_pow2s = cplx(k2s, epsilon);
    if (epsilon == 0.0) {
        sh.k_eps = p.k;
        return sh;
    }
    const double arg = std::atan2(epsilon, k2s) / (2.0 * p.s);
    if (!(arg < kPi * (1.0 - 1e-9)))
        throw DomainError("shift: (k^{2s} + i eps)^{1/(2s)} leaves the principal sheet; reduce epsilon");
    sh.k_eps = std::polar(std::pow(std::abs(sh.k_pow2s), 1.0 / (2.0 * p.s)), arg);
    return sh;
}

double poly_P(double X, double kappa, double s) {
    if (!(X >= 0.0) || !(kappa > 0.0)) throw DomainError("poly_P: need X >= 0 and kappa > 0");
    const double k2s = std::pow(kappa, 2.0 * s);
    return X * X + k2s * k2s - 2.0 * k2s * std::cos(s * kPi) * X;
}

RadialKernel::RadialKernel(cplx kc, double s, int m, bool corrected)
    : kc_(kc), s_(s), m_(m), corrected_(corrected) {
    if (kc == cplx(0.0, 0.0)) throw DomainError("radial kernel: k_eps must be nonzero");
    if (corrected && !integer_branch(s, m)) throw DomainError("F_tilde_m: requires the integer branch 2sm = 1");
    K_ = cpow(kc, 2.0 * s);
    Km_ = std::pow(K_, m);
    helm_coef_ = cpow(kc, 2.0 - 2.0 * s) / s;
    window_ = kWindow * std::abs(kc);
    // The window is only reachable from the real axis when k_eps is close to it.
    use_window_ = kc.real() > 0.0 && std::abs(kc.imag()) < window_;
    if (use_window_) {
        auto fn = [this](cplx w) { return direct(w); };
        cauchy_taylor<kTaylorTerms>(fn, kc_, 0.05 * std::abs(kc_), coef_);
    }
}

cplx RadialKernel::direct(cplx w) const {
    if (corrected_ && m_ == 1) return 0.0;  // s = 1/2: F~_1 vanishes identically
    cplx v = Km_ / (cpow(w, 2.0 * s_ * m_) * (cpow(w, 2.0 * s_) - K_)) - helm_coef_ / (w * w - kc_ * kc_);
    if (corrected_) v += helm_coef_ * s_ / (w * (w + kc_));
    return v;
}

cplx RadialKernel::direct_derivative(cplx w) const {
    if (corrected_ && m_ == 1) return 0.0;
    const double a = 2.0 * s_ * m_;
    const cplx wa = cpow(w, a);
    const cplx w2s = cpow(w, 2.0 * s_);
    const cplx den = w2s - K_;
    cplx d = -Km_ * (a * wa / w * den + wa * 2.0 * s_ * w2s / w) / (wa * wa * den * den);
    const cplx q = w * w - kc_ * kc_;
    d += helm_coef_ * 2.0 * w / (q * q);
    if (corrected_) {
        const cplx c = helm_coef_ * s_;
        d -= c * (2.0 * w + kc_) / (w * w * (w + kc_) * (w + kc_));
    }
    return d;
}

cplx RadialKernel::taylor_value(double rho) const {
    const cplx h = rho - kc_;
    cplx v = 0.0;
    for (int j = kTaylorTerms - 1; j >= 0; --j) v = v * h + coef_[j];
    return v;
}

cplx RadialKernel::value(double rho) const {
    if (!(rho > 0.0)) throw DomainError("F_m: radial frequency must be positive");
    if (use_window_ && in_window(rho)) return taylor_value(rho);
    return direct(rho);
}

cplx RadialKernel::derivative(double rho) const {
    if (!(rho > 0.0)) throw DomainError("F_m: radial frequency must be positive");
    if (use_window_ && in_window(rho)) {
        const cplx h = rho - kc_;
        cplx v = 0.0;
        for (int j = kTaylorTerms - 1; j >= 1; --j) v = v * h + double(j) * coef_[j];
        return v;
    }
    return direct_derivative(rho);
}

cplx F_m(double r, cplx kc, double s, int m) { return RadialKernel(kc, s, m, false).value(r); }

cplx F_tilde_m(double r, cplx kc, double s, int m) { return RadialKernel(kc, s, m, true).value(r); }

cplx multiplier_M(double xi, cplx z, double s) {
    if (z == cplx(0.0, 0.0)) throw DomainError("multiplier_M: z must be nonzero");
    if (!(xi >= 0.0)) throw DomainError("multiplier_M: xi must be non-negative");
    const cplx z2s = cpow(z, 2.0 * s);
    const cplx z22s = cpow(z, 2.0 - 2.0 * s);
    auto direct = [&](cplx w) {
        const cplx w2s = cpow(w, 2.0 * s);
        return (z2s * cpow(w, 2.0 - 2.0 * s) - z22s * w2s) / (w2s - z2s);
    };
    if (xi == 0.0) return 0.0;
    const double window = RadialKernel::kWindow * std::abs(z);
    if (z.real() > 0.0 && std::abs(xi - z) < window) {
        std::array<cplx, RadialKernel::kTaylorTerms> a;
        cauchy_taylor<RadialKernel::kTaylorTerms>(direct, z, 0.05 * std::abs(z), a);
        const cplx h = xi - z;
        cplx v = 0.0;
        for (int j = RadialKernel::kTaylorTerms - 1; j >= 0; --j) v = v * h + a[j];
        return v;
    }
    return direct(xi);
}

cplx helm_part(int n, double s, cplx kc, double r) {
    if (!(r > 0.0)) throw DomainError("helm_part: r must be positive");
    switch (n) {
        case 1: return kI * std::exp(kI * r * kc) / (2.0 * s * cpow(kc, 2.0 * s - 1.0));
        case 2: return kI * cpow(kc, 2.0 - 2.0 * s) / (4.0 * s) * hankel1_0(kc * r);
        case 3: return cpow(kc, 2.0 - 2.0 * s) / s * std::exp(kI * r * kc) / (4.0 * kPi * r);
        default: throw DomainError("helm_part: dimension must be 1, 2 or 3");
    }
}

cplx helm_part_derivative(int n, double s, cplx kc, double r) {
    if (!(r > 0.0)) throw DomainError("helm_part_derivative: r must be positive");
    switch (n) {
        case 1: return -kc * std::exp(kI * r * kc) / (2.0 * s * cpow(kc, 2.0 * s - 1.0));
        case 2: return -kI * cpow(kc, 2.0 - 2.0 * s) * kc / (4.0 * s) * hankel1_1(kc * r);
        case 3:
            return cpow(kc, 2.0 - 2.0 * s) / (4.0 * kPi * s) * std::exp(kI * r * kc) * (kI * kc * r - 1.0) /
                   (r * r);
        default: throw DomainError("helm_part_derivative: dimension must be 1, 2 or 3");
    }
}

cplx j_tail_integrand(int n, double s, int m, cplx kc, double r, double y) {
    if (!(y > 0.0) || !(r > 0.0)) throw DomainError("j_tail_integrand: need y > 0 and r > 0");
    const cplx K = cpow(kc, 2.0 * s);
    const double u = y / r;
    const double u2s = std::pow(u, 2.0 * s);
    const cplx D = u2s * u2s - 2.0 * u2s * K * std::cos(kPi * s) + K * K;
    switch (n) {
        case 1: return std::exp(-y) / r * (std::sin(kPi * s) / kPi) * u2s / D;
        case 2: {
            const bool corrected = integer_branch(s, m);
            return bessel_j0(y * r) * y * RadialKernel(kc, s, m, corrected).value(y);
        }
        case 3: {
            const cplx br = std::pow(u, 1.0 - 2.0 * s * m) *
                            (u2s * std::sin(kPi * s * (m + 1)) - K * std::sin(kPi * s * m)) / D;
            return std::exp(-y) / r * std::pow(K, m) / (2.0 * kPi * kPi * r) * br;
        }
        default: throw DomainError("j_tail_integrand: dimension must be 1, 2 or 3");
    }
}

}  // namespace frachelm
