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


#include "frachelm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "frachelm/parallel.hpp"

namespace frachelm {

const char* part_name(FieldPart part) { return part == FieldPart::JTail ? "j_tail" : "nonhelm_total"; }

FieldPart parse_part(const std::string& name) {
    if (name == "j_tail") return FieldPart::JTail;
    if (name == "nonhelm_total") return FieldPart::NonHelmTotal;
    throw DomainError("unknown field part '" + name + "' (expected j_tail or nonhelm_total)");
}

namespace {

std::vector<double> log_grid(double a, double b, int count) {
    std::vector<double> r(count);
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < count; ++i) r[i] = std::exp(la + (lb - la) * i / (count - 1));
    r.front() = a;
    r.back() = b;
    return r;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RateFit rate_check(const Problem& p, FieldPart part, double r_min, double r_max, double rate, bool log_weight,
                   bool toward_zero, const RateCheckOptions& opt) {
    p.validate();
    opt.quad.validate();
    if (opt.samples < 3) throw DomainError("rate check: need at least 3 samples");
    if (!(opt.drift > 1.0)) throw DomainError("rate check: drift factor must exceed 1");
    const SpectralShift sh = make_shift(p, 0.0);
    RateFit fit;
    fit.radii = log_grid(r_min, r_max, opt.samples);
    fit.values.assign(fit.radii.size(), 0.0);
    fit.claimed_rate = rate;
    fit.log_weight = log_weight;
    fit.drift = opt.drift;
    parallel_for(fit.radii.size(), [&](std::size_t i) {
        const GreenDecomposition g = green_eval(p, sh, fit.radii[i], opt.quad);
        const cplx v = part == FieldPart::JTail ? g.j_tail : g.total - g.helm;
        fit.values[i] = std::max(std::abs(v), std::numeric_limits<double>::min());
    });
    std::vector<double> lx, ly, prod;
    for (std::size_t i = 0; i < fit.radii.size(); ++i) {
        const double r = fit.radii[i];
        lx.push_back(std::log(r));
        ly.push_back(std::log(fit.values[i]));
        prod.push_back(log_weight ? fit.values[i] / (-std::log(r)) : fit.values[i] * std::pow(r, rate));
    }
    fit.slope = ls_slope(lx, ly);
    if (toward_zero) std::reverse(prod.begin(), prod.end());
    fit.envelope_ratio = envelope_growth(prod);
    fit.envelope_bounded = fit.envelope_ratio <= opt.drift;
    return fit;
}

}  // namespace

ClaimedRate theorem_rate(const Problem& p, bool toward_zero) {
    p.validate();
    const Regime reg = p.regime();
    const double s = p.s;
    const bool high = reg.branch == Branch::High;
    ClaimedRate c;
    switch (p.n) {
        case 1:
            if (!toward_zero) c.rate = 1.0 + 2.0 * s;
            else if (high) c.rate = 0.0;
            else if (std::abs(s - 0.5) < kRegimeSnapTol) c.log_weight = true;
            else c.rate = 1.0 - 2.0 * s;
            break;
        case 2:
            c.rate = 1.0;
            break;
        default:
            if (high) c.rate = toward_zero ? 3.0 - 2.0 * s : 3.0 + 2.0 * s;
            else c.rate = 3.0 - 2.0 * s * reg.m;
    }
    return c;
}

double envelope_growth(const std::vector<double>& products) {
    if (products.empty()) return 0.0;
    const std::size_t head = std::max<std::size_t>(2, (products.size() + 9) / 10);
    double ref = 0.0, top = 0.0;
    for (std::size_t i = 0; i < products.size(); ++i) {
        if (i < head) ref = std::max(ref, products[i]);
        top = std::max(top, products[i]);
    }
    if (!(ref > 0.0)) return std::numeric_limits<double>::infinity();
    return top / ref;
}

RateFit decay_rate_check(const Problem& p, FieldPart part, double r_min, double r_max, double claimed_rate,
                         const RateCheckOptions& opt) {
    if (!(r_min >= 10.0 * (1 - 1e-12)) || !(r_max <= 1e4 * (1 + 1e-12)) || !(r_min < r_max))
        throw DomainError("decay_rate_check: window must lie in [10, 1e4]");
    return rate_check(p, part, r_min, r_max, claimed_rate, false, false, opt);
}

RateFit singularity_rate_check(const Problem& p, FieldPart part, double r_min, double r_max, double claimed_rate,
                               bool log_weight, const RateCheckOptions& opt) {
    if (!(r_min > 0.0) || !(r_max <= 0.5 * (1 + 1e-12)) || !(r_min < r_max))
        throw DomainError("singularity_rate_check: window must lie in (0, 0.5]");
    return rate_check(p, part, r_min, r_max, claimed_rate, log_weight, true, opt);
}

PointField radial_field(int dim, std::function<std::pair<cplx, cplx>(double)> profile) {
    if (dim < 1 || dim > 3) throw DomainError("radial_field: dim must be 1, 2 or 3");
    struct Cache {
        std::mutex guard;
        std::map<double, std::pair<cplx, cplx>> values;
    };
    auto cache = std::make_shared<Cache>();
    return [dim, profile = std::move(profile), cache](const Point& x) {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
        const double r = std::sqrt(r2);
        if (!(r > 0.0)) throw DomainError("radial_field: evaluation at the origin");
        std::pair<cplx, cplx> v;
        bool hit = false;
        {
            std::lock_guard<std::mutex> lock(cache->guard);
            auto it = cache->values.find(r);
            if (it != cache->values.end()) {
                v = it->second;
                hit = true;
            }
        }
        if (!hit) {
            v = profile(r);
            std::lock_guard<std::mutex> lock(cache->guard);
            cache->values.emplace(r, v);
        }
        FieldSample out;
        out.value = v.first;
        for (int a = 0; a < dim; ++a) out.grad[a] = v.second * (x[a] / r);
        return out;
    };
}

namespace {

struct SphereRule {
    std::vector<Point> dirs;
    std::vector<double> weights;  // sum to 1
    double area = 1.0;            // |S^{n-1}|
};

SphereRule sphere_rule(int dim, int angular, int polar) {
    SphereRule s;
    if (dim == 1) {
        s.dirs = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
        s.weights = {0.5, 0.5};
        s.area = 2.0;
    } else if (dim == 2) {
        for (int j = 0; j < angular; ++j) {
            const double t = 2.0 * kPi * j / angular;
            s.dirs.push_back({std::cos(t), std::sin(t), 0.0});
            s.weights.push_back(1.0 / angular);
        }
        s.area = 2.0 * kPi;
    } else {
        std::vector<double> x, w;
        gauss_legendre(polar, x, w);
        for (int i = 0; i < polar; ++i) {
            const double ct = x[i], st = std::sqrt(1.0 - ct * ct);
            for (int j = 0; j < angular; ++j) {
                const double ph = 2.0 * kPi * j / angular;
                s.dirs.push_back({st * std::cos(ph), st * std::sin(ph), ct});
                s.weights.push_back(0.5 * w[i] / angular);
            }
        }
        s.area = 4.0 * kPi;
    }
    return s;
}

}  // namespace

RadiationReport radiation_classify(const PointField& field, const RadiationOptions& opt) {
    if (opt.dim < 1 || opt.dim > 3) throw DomainError("radiation_classify: dim must be 1, 2 or 3");
    if (!(opt.delta > 0.5 && opt.delta < 1.0)) throw DomainError("radiation_classify: delta must lie in (1/2, 1)");
    if (!(opt.k > 0.0) || !(opt.R0 > 0.0) || !(opt.R_max >= 2.0 * opt.R0))
        throw DomainError("radiation_classify: need k > 0 and R_max >= 2 R0");
    if ((opt.dim >= 2 && opt.angular < 4) || (opt.dim == 3 && opt.polar < 2) || opt.radial_order < 2 ||
        opt.radial_split < 1)
        throw DomainError("radiation_classify: sample counts too small");
    if (!field) throw DomainError("radiation_classify: field with gradient required");

    const int n = opt.dim;
    const double k = opt.k;
    const SphereRule sph = sphere_rule(n, opt.angular, opt.polar);

    // returns (mean |u_r - iku|, mean |grad u - ik xhat u|^2) on the sphere of radius r
    auto sphere = [&](double r) {
        double res = 0.0, gs = 0.0;
        for (std::size_t i = 0; i < sph.dirs.size(); ++i) {
            const Point& d = sph.dirs[i];
            const Point x{r * d[0], r * d[1], r * d[2]};
            const FieldSample f = field(x);
            cplx ur = 0.0;
            double g2 = 0.0;
            for (int a = 0; a < n; ++a) {
                ur += f.grad[a] * d[a];
                g2 += std::norm(f.grad[a] - kI * k * d[a] * f.value);
            }
            res += sph.weights[i] * std::abs(ur - kI * k * f.value);
            gs += sph.weights[i] * g2;
        }
        return std::pair<double, double>{res, gs};
    };

    std::vector<double> radii;
    for (double R = opt.R0; R <= opt.R_max * (1 + 1e-12); R *= 2.0) radii.push_back(R);

    RadiationReport rep;
    rep.delta = opt.delta;
    rep.src_profile.resize(radii.size());
    parallel_for(radii.size(), [&](std::size_t j) {
        const double r = radii[j];
        rep.src_profile[j] = {r, std::pow(r, 0.5 * (n - 1)) * sphere(r).first};
    });

    std::vector<double> gx, gw;
    gauss_legendre(opt.radial_order, gx, gw);
    const std::size_t panels = radii.size() - 1;
    const std::size_t per_panel = static_cast<std::size_t>(opt.radial_split * opt.radial_order);
    std::vector<double> contrib(panels * per_panel, 0.0);
    parallel_for(contrib.size(), [&](std::size_t idx) {
        const std::size_t pnl = idx / per_panel, rest = idx % per_panel;
        const int sub = static_cast<int>(rest) / opt.radial_order, q = static_cast<int>(rest) % opt.radial_order;
        const double a = radii[pnl], b = radii[pnl + 1];
        const double w = (b - a) / opt.radial_split;
        const double lo = a + sub * w, mid = lo + 0.5 * w, half = 0.5 * w;
        const double r = mid + half * gx[q];
        const double weight = std::pow(1.0 + r * r, opt.delta - 1.0) * std::pow(r, n - 1) * sph.area;
        contrib[idx] = gw[q] * half * weight * sphere(r).second;
    });
    double total = 0.0;
    rep.gsrc_partial.push_back({radii[0], 0.0});
    for (std::size_t pnl = 0; pnl < panels; ++pnl) {
        for (std::size_t i = 0; i < per_panel; ++i) total += contrib[pnl * per_panel + i];
        rep.gsrc_partial.push_back({radii[pnl + 1], total});
    }

    rep.verdict_src = rep.src_profile.back().second < opt.src_ratio * rep.src_profile.front().second;
    const double last = rep.gsrc_partial.back().second;
    const double prev = rep.gsrc_partial[rep.gsrc_partial.size() - 2].second;
    rep.verdict_gsrc = last <= 0.0 || (last - prev) < opt.gsrc_tol * last;
    return rep;
}

LapFit lap_slope(const Problem& p, double r, const std::vector<double>& eps_list, const QuadratureSpec& spec) {
    p.validate();
    if (!(r > 0.0)) throw DomainError("lap_slope: r must be positive");
    if (eps_list.size() < 2) throw DomainError("lap_slope: need at least two eps values");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] >= 0.0) || !std::isfinite(eps_list[i])) throw DomainError("lap_slope: eps must be >= 0");
        if (i > 0 && eps_list[i] > eps_list[i - 1]) throw DomainError("lap_slope: eps list must be decreasing");
    }
    const GreenDecomposition g0 = green_eval(p, make_shift(p, 0.0), r, spec);
    LapFit fit;
    fit.eps = eps_list;
    fit.diffs.assign(eps_list.size(), 0.0);
    fit.noise.assign(eps_list.size(), 0.0);
    parallel_for(eps_list.size(), [&](std::size_t i) {
        const GreenDecomposition g = green_eval(p, make_shift(p, eps_list[i]), r, spec);
        fit.diffs[i] = std::abs(g.total - g0.total);
        fit.noise[i] = g.err_estimate + g0.err_estimate;
    });
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(fit.diffs[i] > 10.0 * fit.noise[i]) || eps_list[i] == 0.0)
            throw AccuracyError("lap_slope: difference below quadrature noise (inconclusive)", fit.diffs[i],
                                fit.noise[i]);
        lx.push_back(std::log(eps_list[i]));
        ly.push_back(std::log(fit.diffs[i]));
    }
    fit.slope = ls_slope(lx, ly);
    return fit;
}

ConvolutionNorm convolution_norm_check(const Problem& p, const PotentialGrid& f, const ConvolutionOptions& opt) {
    p.validate();
    f.validate();
    if (p.n != f.dim) throw DomainError("convolution_norm_check: dimension mismatch");
    if (!(opt.delta > 0.5 && opt.delta < 1.0)) throw DomainError("convolution_norm_check: delta must lie in (1/2, 1)");
    if (!(opt.truncation > 0.0) || opt.radial_panels_per_unit < 1)
        throw DomainError("convolution_norm_check: bad truncation settings");
    const int n = p.n;

    double hmin = 1e300, diam2 = 0.0, far2 = 0.0;
    for (int a = 0; a < n; ++a) {
        hmin = std::min(hmin, f.h[a]);
        diam2 += (f.hi[a] - f.lo[a]) * (f.hi[a] - f.lo[a]);
        far2 += std::max(f.lo[a] * f.lo[a], f.hi[a] * f.hi[a]);
    }
    const double r_hi = 1.01 * (opt.truncation + std::sqrt(far2) + std::sqrt(diam2)) + 4.0 * hmin;
    const RadialKernelTable G(p, 1e-8 * hmin, r_hi, opt.scatter.quad);

    std::vector<cplx> density(f.q_values.begin(), f.q_values.end());
    ConvolutionNorm out;
    double src = 0.0;
    for (double q : f.q_values) src += q * q * f.cell_volume;
    out.source_norm = std::sqrt(src);

    std::vector<double> gx, gw;
    gauss_legendre(16, gx, gw);
    const SphereRule sph = sphere_rule(n, opt.angular, opt.polar);
    const double R = opt.truncation;
    const int panels = static_cast<int>(std::ceil(R * opt.radial_panels_per_unit));
    const double pw = R / panels;
    // radial nodes on (0, R); the sphere rule covers both signs in 1D
    std::vector<double> rn, rw;
    for (int pnl = 0; pnl < panels; ++pnl)
        for (std::size_t q = 0; q < gx.size(); ++q) {
            rn.push_back((pnl + 0.5) * pw + 0.5 * pw * gx[q]);
            rw.push_back(0.5 * pw * gw[q]);
        }
    const std::size_t nd = sph.dirs.size();
    std::vector<double> acc(rn.size() * nd, 0.0);
    ScatterOptions so = opt.scatter;
    // the outer loop is parallel; keep the inner potential sequential
    parallel_for(acc.size(), [&](std::size_t idx) {
        const std::size_t i = idx / nd, j = idx % nd;
        const double r = rn[i];
        const Point& d = sph.dirs[j];
        const Point x{r * d[0], r * d[1], r * d[2]};
        cplx u = 0.0;
        for (std::size_t c = 0; c < f.size(); ++c) {
            if (density[c] == 0.0) continue;
            const Point& y = f.nodes[c];
            bool near = true;
            double dd = 0.0;
            for (int a = 0; a < n; ++a) {
                near = near && std::abs(x[a] - y[a]) <= (so.near_cells + 0.5) * f.h[a];
                dd += (x[a] - y[a]) * (x[a] - y[a]);
            }
            const cplx w = near ? cell_integral(G, y, f.h, x, so.local_panels) : f.cell_volume * G.value(std::sqrt(dd));
            u += w * density[c];
        }
        acc[idx] = rw[i] * sph.weights[j] * sph.area * std::pow(r, n - 1) * std::pow(1.0 + r * r, -opt.delta) *
                   std::norm(u);
    });
    double num = 0.0;
    for (double v : acc) num += v;
    out.weighted_norm = std::sqrt(num);
    out.ratio = out.source_norm > 0.0 ? out.weighted_norm / out.source_norm : 0.0;
    return out;
}

}  // namespace frachelm
