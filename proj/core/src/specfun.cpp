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

#include "frachelm/specfun.hpp"

#include <cmath>
#include <limits>

#include "frachelm/quadrature.hpp"

namespace frachelm {

namespace {

constexpr double kTwoOverPi = 2.0 / kPi;

bool on_cut(cplx z) { return z.imag() == 0.0 && z.real() <= 0.0; }

// Series and Miller recurrences share a scalar template so the real path
// avoids complex arithmetic in the Bessel-transform inner loops.
template <class T>
void j01_series(T z, T& j0, T& j1) {
    const T q = -z * z / 4.0;
    T t0 = 1.0, t1 = z / 2.0;
    j0 = t0;
    j1 = t1;
    for (int k = 1; k < 200; ++k) {
        t0 *= q / (double(k) * k);
        t1 *= q / (double(k) * (k + 1));
        j0 += t0;
        j1 += t1;
        if (std::abs(t0) < 1e-17 * std::abs(j0) && std::abs(t1) < 1e-17 * std::abs(j1)) break;
    }
}

template <class T>
void j01_miller(T z, T& j0, T& j1) {
    const double az = std::abs(z);
    int top = static_cast<int>(az + 12.0 * std::cbrt(az) + 16.0);
    top += top % 2;
    T jp1 = 0.0, jn = 1e-30;
    T norm = 0.0;
    T j1v = 0.0;
    for (int nu = top; nu >= 1; --nu) {
        const T jm1 = (2.0 * nu) / z * jn - jp1;
        jp1 = jn;
        jn = jm1;  // now J_{nu-1}
        if ((nu - 1) % 2 == 0 && nu - 1 > 0) norm += 2.0 * jn;
        if (nu - 1 == 1) j1v = jn;
        if (std::abs(jn) > 1e250) {
            jn *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            j1v *= 1e-250;
        }
    }
    norm += jn;
    j0 = jn / norm;
    j1 = j1v / norm;
}

}  // namespace

double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive");
    return std::tgamma(x);
}

namespace detail {

BesselSet bessel_series(cplx z) {
    BesselSet b;
    j01_series(z, b.j0, b.j1);
    const cplx q = -z * z / 4.0;
    const cplx lg = std::log(z / 2.0);
    // Y0: (2/pi)(ln(z/2)+gamma) J0 - (2/pi) sum_k H_k q^k/(k!)^2
    // Y1: (2/pi) ln(z/2) J1 - 2/(pi z) - (1/pi)(z/2) sum_k (psi(k+1)+psi(k+2)) q^k/(k!(k+1)!)
    cplx t0 = 1.0, t1 = 1.0;
    cplx s0 = 0.0, s1 = (-kEulerGamma + (1.0 - kEulerGamma)) * t1;
    double hk = 0.0;
    for (int k = 1; k < 200; ++k) {
        hk += 1.0 / k;
        t0 *= q / (double(k) * k);
        t1 *= q / (double(k) * (k + 1));
        const cplx d0 = hk * t0;
        const cplx d1 = ((hk - kEulerGamma) + (hk + 1.0 / (k + 1) - kEulerGamma)) * t1;
        s0 += d0;
        s1 += d1;
        if (std::abs(d0) < 1e-17 * std::abs(s0) && std::abs(d1) < 1e-17 * std::abs(s1)) break;
    }
    b.y0 = kTwoOverPi * ((lg + kEulerGamma) * b.j0 - s0);
    b.y1 = kTwoOverPi * lg * b.j1 - kTwoOverPi / z - (z / 2.0) * s1 / kPi;
    return b;
}

BesselSet bessel_miller(cplx z) {
    // Backward recurrence normalised by J0 + 2 sum J_2k = 1; Neumann series for Y0, Y1.
    const double az = std::abs(z);
    int top = static_cast<int>(az + 12.0 * std::cbrt(az) + 16.0);
    top += top % 2;
    std::vector<cplx> j(top + 2, 0.0);
    j[top + 1] = 0.0;
    j[top] = 1e-30;
    for (int nu = top; nu >= 1; --nu) {
        j[nu - 1] = (2.0 * nu) / z * j[nu] - j[nu + 1];
        if (std::abs(j[nu - 1]) > 1e250)
            for (int i = nu - 1; i <= top; ++i) j[i] *= 1e-250;
    }
    cplx norm = j[0];
    for (int k = 2; k <= top; k += 2) norm += 2.0 * j[k];
    for (cplx& v : j) v /= norm;
    cplx s0 = 0.0, s1 = 0.0;
    for (int k = 1; 2 * k + 1 <= top; ++k) {
        const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        s0 += sgn * j[2 * k] / double(k);
        s1 += sgn * (2.0 * k + 1.0) / (double(k) * (k + 1)) * j[2 * k + 1];
    }
    const cplx lg = std::log(z / 2.0) + kEulerGamma;
    BesselSet b;
    b.j0 = j[0];
    b.j1 = j[1];
    b.y0 = kTwoOverPi * lg * j[0] - 2.0 * kTwoOverPi * s0;
    b.y1 = -kTwoOverPi / z * j[0] + kTwoOverPi * (lg - 1.0) * j[1] - kTwoOverPi * s1;
    return b;
}

void hankel_asymptotic(cplx z, cplx& h0, cplx& h1) {
    // H_nu(z) ~ sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)} sum_k i^k a_k(nu) / z^k
    cplx sum0 = 1.0, sum1 = 1.0;
    cplx t0 = 1.0, t1 = 1.0;
    double last0 = 1.0, last1 = 1.0;
    bool done0 = false, done1 = false;
    for (int k = 1; k < 60 && !(done0 && done1); ++k) {
        const double odd = (2.0 * k - 1.0) * (2.0 * k - 1.0);
        const cplx step = kI / (8.0 * k * z);
        if (!done0) {
            const cplx n0 = t0 * (0.0 - odd) * step;
            if (std::abs(n0) > last0 || std::abs(n0) < 1e-17) done0 = true;
            if (std::abs(n0) <= last0) {
                t0 = n0;
                sum0 += t0;
                last0 = std::abs(t0);
            }
        }
        if (!done1) {
            const cplx n1 = t1 * (4.0 - odd) * step;
            if (std::abs(n1) > last1 || std::abs(n1) < 1e-17) done1 = true;
            if (std::abs(n1) <= last1) {
                t1 = n1;
                sum1 += t1;
                last1 = std::abs(t1);
            }
        }
    }
    const cplx pre = std::sqrt(2.0 / (kPi * z));
    h0 = pre * std::exp(kI * (z - kPi / 4.0)) * sum0;
    h1 = pre * std::exp(kI * (z - 3.0 * kPi / 4.0)) * sum1;
}

void hankel_integral(cplx z, cplx& h0, cplx& h1) {
    // H0 = -(2i/pi) int_0^inf e^{iz cosh t} dt, H1 = -(2/pi) int_0^inf e^{iz cosh t} cosh t dt,
    // valid for Im z > 0. The trapezoid rule on the even analytic integrand
    // converges geometrically; the step follows the strip of analyticity.
    const double strip = std::atan2(z.imag(), std::abs(z.real()));
    const double h = std::min(0.1, 2.0 * kPi * strip / 40.0);
    const double tmax = std::acosh(1.0 + 45.0 / z.imag());
    cplx s0 = 0.5 * std::exp(kI * z);
    cplx s1 = s0;
    for (double t = h; t <= tmax + h; t += h) {
        const double c = std::cosh(t);
        const cplx e = std::exp(kI * z * c);
        s0 += e;
        s1 += e * c;
    }
    h0 = -2.0 * kI / kPi * (h * s0);
    h1 = -2.0 / kPi * (h * s1);
}

cplx struve_k0_integral(cplx z) {
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-300;
    spec.bessel_intervals = 40;
    const double az = std::abs(z);
    auto g = [z](double t) { return 1.0 / (t + z); };
    return kTwoOverPi * integrate_bessel_transform(g, 1.0, spec, {az}).value;
}

cplx struve_k1_integral(cplx z) {
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-300;
    spec.bessel_intervals = 40;
    const double az = std::abs(z);
    auto g = [z](double t) { return 1.0 / ((t + z) * (t + z)); };
    return kTwoOverPi + kTwoOverPi * integrate_bessel_transform(g, 1.0, spec, {az}).value;
}

cplx struve_k0_asymptotic(cplx z) {
    // (1/pi) sum_k (-1)^k Gamma(k+1/2)^2/pi (2/z)^{2k+1}; ratio -(2k+1)^2/z^2.
    const cplx w = 1.0 / (z * z);
    cplx term = 2.0 / z, sum = term;
    double last = std::abs(term);
    for (int k = 1; k < 200; ++k) {
        const cplx next = -term * (2.0 * k - 1.0) * (2.0 * k - 1.0) * w;
        if (std::abs(next) >= last) break;
        term = next;
        sum += term;
        last = std::abs(term);
        if (last < 1e-17 * std::abs(sum)) break;
    }
    return sum / kPi;
}

cplx struve_k1_asymptotic(cplx z) {
    // (1/pi) sum_k Gamma(k+1/2)/Gamma(3/2-k) (2/z)^{2k}
    // terms: 2, 2/z^2, then ratio -(2k-1)(2k-3)/z^2.
    const cplx w = 1.0 / (z * z);
    cplx sum = 2.0;
    cplx term = 2.0 * w;
    sum += term;
    double last = std::abs(term);
    for (int k = 2; k < 200; ++k) {
        const cplx next = -term * (2.0 * k - 1.0) * (2.0 * k - 3.0) * w;
        if (std::abs(next) >= last) break;
        term = next;
        sum += term;
        last = std::abs(term);
        if (last < 1e-17 * std::abs(sum)) break;
    }
    return sum / kPi;
}

cplx expint_e1_series(cplx z) {
    cplx sum = 0.0, term = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= -z / double(k);
        const cplx d = term / double(k);
        sum += d;
        if (std::abs(d) < 1e-17 * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(z) - sum;
}

cplx expint_e1_fraction(cplx z) {
    // Modified Lentz on e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...))).
    const double tiny = 1e-300;
    cplx b = z + 1.0;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < 20000; ++i) {
        const double an = -double(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const cplx del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-z);
}

}  // namespace detail

double bessel_j0(double x) {
    if (!(x >= 0.0)) throw DomainError("bessel_j0: negative argument");
    double j0, j1;
    if (x <= detail::kBesselSeriesRadius) {
        j01_series(x, j0, j1);
        return j0;
    }
    if (x < detail::kBesselAsymptoticRadius) {
        j01_miller(x, j0, j1);
        return j0;
    }
    cplx h0, h1;
    detail::hankel_asymptotic(cplx(x, 0.0), h0, h1);
    return h0.real();
}

double bessel_j1(double x) {
    if (!(x >= 0.0)) throw DomainError("bessel_j1: negative argument");
    double j0, j1;
    if (x <= detail::kBesselSeriesRadius) {
        j01_series(x, j0, j1);
        return j1;
    }
    if (x < detail::kBesselAsymptoticRadius) {
        j01_miller(x, j0, j1);
        return j1;
    }
    cplx h0, h1;
    detail::hankel_asymptotic(cplx(x, 0.0), h0, h1);
    return h1.real();
}

double bessel_y0(double x) {
    if (!(x > 0.0)) throw DomainError("bessel_y0: argument must be positive");
    return hankel1_0(cplx(x, 0.0)).imag();
}

double bessel_y1(double x) {
    if (!(x > 0.0)) throw DomainError("bessel_y1: argument must be positive");
    return hankel1_1(cplx(x, 0.0)).imag();
}

namespace {

void hankel_pair(cplx z, cplx& h0, cplx& h1) {
    if (on_cut(z)) throw DomainError("hankel1: argument on the branch cut (-inf, 0]");
    const double az = std::abs(z);
    if (az >= detail::kBesselAsymptoticRadius) {
        detail::hankel_asymptotic(z, h0, h1);
        return;
    }
    if (az > detail::kBesselSeriesRadius && z.imag() >= detail::kHankelIntegralImag) {
        detail::hankel_integral(z, h0, h1);
        return;
    }
    const detail::BesselSet b =
        az <= detail::kBesselSeriesRadius ? detail::bessel_series(z) : detail::bessel_miller(z);
    h0 = b.j0 + kI * b.y0;
    h1 = b.j1 + kI * b.y1;
}

}  // namespace

cplx hankel1_0(cplx z) {
    cplx h0, h1;
    hankel_pair(z, h0, h1);
    return h0;
}

cplx hankel1_1(cplx z) {
    cplx h0, h1;
    hankel_pair(z, h0, h1);
    return h1;
}

cplx struve_k0(cplx z) {
    if (on_cut(z)) throw DomainError("struve_k0: argument on the branch cut (-inf, 0]");
    if (std::abs(z) >= detail::kStruveAsymptoticRadius) return detail::struve_k0_asymptotic(z);
    return detail::struve_k0_integral(z);
}

cplx struve_k1(cplx z) {
    if (on_cut(z)) throw DomainError("struve_k1: argument on the branch cut (-inf, 0]");
    if (std::abs(z) >= detail::kStruveAsymptoticRadius) return detail::struve_k1_asymptotic(z);
    return detail::struve_k1_integral(z);
}

cplx expint_e1(cplx z) {
    if (on_cut(z)) throw DomainError("expint_e1: argument at the origin or on the branch cut");
    const double az = std::abs(z);
    if (az <= detail::kE1SeriesRadius || (z.real() < 0.0 && std::abs(z.imag()) < 1.0 && az < 40.0))
        return detail::expint_e1_series(z);
    return detail::expint_e1_fraction(z);
}

double riesz_constant(int n, double s, int j) {
    if (n < 1 || n > 3) throw DomainError("riesz_constant: dimension must be 1, 2 or 3");
    if (j < 0) throw DomainError("riesz_constant: index must be non-negative");
    const double a = s * (j + 1);
    if (!(a > 0.0) || !(2.0 * a < n)) throw DomainError("riesz_constant: need 0 < 2s(j+1) < n");
    return gamma_fn(0.5 * n - a) / (std::pow(4.0, a) * std::pow(kPi, 0.5 * n) * gamma_fn(a));
}

}  // namespace frachelm
