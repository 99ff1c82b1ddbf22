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


#include "frachelm/scattering.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "frachelm/parallel.hpp"
#include "frachelm/specfun.hpp"

namespace frachelm {

namespace {

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

struct Rule {
    std::vector<double> x, w;  // on [-1, 1]
};

const Rule& gl16() {
    static const Rule rule = [] {
        Rule r;
        gauss_legendre(16, r.x, r.w);
        return r;
    }();
    return rule;
}

// Composite 16-point Gauss-Legendre on [a, b] with `panels` equal pieces.
template <class F>
cplx composite(F&& f, double a, double b, int panels) {
    const Rule& g = gl16();
    cplx sum = 0.0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * w, half = 0.5 * w;
        for (std::size_t j = 0; j < g.x.size(); ++j) sum += g.w[j] * half * f(mid + half * g.x[j]);
    }
    return sum;
}

// int_0^{atan(rho_max/d)} Phi(d sec phi) wt(phi) dphi with wt = 1 (dim 2) or sin (dim 3).
// Up to R = 2d the angle is the variable; beyond that ln R, which keeps the
// integrand smooth when d is small next to the face.
cplx radial_face(const RadialKernelTable& G, double d, double rho_max, bool sine, int panels) {
    if (rho_max <= 0.0) return 0.0;
    const double phi_max = std::atan2(rho_max, d);
    const double phi_split = std::min(phi_max, kPi / 3.0);
    cplx out = composite(
        [&](double phi) {
            const cplx v = G.phi(d / std::cos(phi));
            return sine ? v * std::sin(phi) : v;
        },
        0.0, phi_split, panels);
    if (phi_max > phi_split) {
        const double R_max = std::hypot(d, rho_max);
        const double v0 = std::log(2.0 * d), v1 = std::log(R_max);
        const int np = panels * std::max(1, static_cast<int>(std::ceil((v1 - v0) / std::log(2.0))));
        out += composite(
            [&](double v) {
                const double R = std::exp(v);
                const cplx ph = G.phi(R);
                return sine ? ph * (d / R) : ph * (d / std::sqrt(R * R - d * d));
            },
            v0, v1, np);
    }
    return out;
}

// Face integral over the quarter rectangle [0,A]x[0,B] seen from height d (dim 3).
cplx corner_rect(const RadialKernelTable& G, double d, double A, double B, int panels) {
    if (A <= 0.0 || B <= 0.0) return 0.0;
    const double psi_d = std::atan2(B, A);
    cplx out = composite([&](double psi) { return radial_face(G, d, A / std::cos(psi), true, panels); }, 0.0,
                         psi_d, panels);
    out += composite([&](double psi) { return radial_face(G, d, B / std::sin(psi), true, panels); }, psi_d,
                     0.5 * kPi, panels);
    return out;
}

}  // namespace

// ---------------------------------------------------------------- grid

void PotentialGrid::validate() const {
    if (dim < 1 || dim > 3) throw DomainError("PotentialGrid: dim must be 1, 2 or 3");
    if (cells_per_axis < 1) throw DomainError("PotentialGrid: cells_per_axis must be positive");
    for (int a = 0; a < dim; ++a)
        if (!(lo[a] < hi[a])) throw DomainError("PotentialGrid: empty box");
    std::size_t expect = 1;
    for (int a = 0; a < dim; ++a) expect *= static_cast<std::size_t>(cells_per_axis);
    if (nodes.size() != expect || q_values.size() != expect)
        throw DomainError("PotentialGrid: node count must be cells_per_axis^dim");
    for (double q : q_values)
        if (!std::isfinite(q)) throw DomainError("PotentialGrid: q must be finite");
}

std::array<int, 3> PotentialGrid::cell_index(std::size_t node) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        idx[a] = static_cast<int>(node % cells_per_axis);
        node /= cells_per_axis;
    }
    return idx;
}

PotentialGrid make_potential_grid(int dim, const Point& lo, const Point& hi, int cells,
                                  std::vector<double> q_values) {
    PotentialGrid g;
    g.dim = dim;
    g.cells_per_axis = cells;
    if (dim < 1 || dim > 3 || cells < 1) throw DomainError("make_potential_grid: bad dimension or cell count");
    g.cell_volume = 1.0;
    for (int a = 0; a < dim; ++a) {
        g.lo[a] = lo[a];
        g.hi[a] = hi[a];
        g.h[a] = (hi[a] - lo[a]) / cells;
        g.cell_volume *= g.h[a];
    }
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(cells);
    g.nodes.resize(total);
    g.q_values = std::move(q_values);
    for (std::size_t i = 0; i < total; ++i) {
        const auto idx = g.cell_index(i);
        Point x{0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a) x[a] = g.lo[a] + (idx[a] + 0.5) * g.h[a];
        g.nodes[i] = x;
    }
    g.validate();
    for (double q : g.q_values) g.q_sup = std::max(g.q_sup, std::abs(q));
    return g;
}

PotentialGrid make_potential_grid(int dim, const Point& lo, const Point& hi, int cells,
                                  const std::function<double(const Point&)>& q) {
    if (dim < 1 || dim > 3 || cells < 1) throw DomainError("make_potential_grid: bad dimension or cell count");
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(cells);
    PotentialGrid g = make_potential_grid(dim, lo, hi, cells, std::vector<double>(total, 0.0));
    for (std::size_t i = 0; i < total; ++i) g.q_values[i] = q(g.nodes[i]);
    g.validate();
    g.q_sup = 0.0;
    for (double v : g.q_values) g.q_sup = std::max(g.q_sup, std::abs(v));
    return g;
}

void IncidentField::validate(int dim) const {
    double norm2 = 0.0;
    for (int a = 0; a < 3; ++a) {
        if (a >= dim && direction[a] != 0.0) throw DomainError("IncidentField: direction has extra components");
        norm2 += direction[a] * direction[a];
    }
    if (std::abs(norm2 - 1.0) > 1e-12) throw DomainError("IncidentField: direction must be a unit vector");
}

cplx IncidentField::value(const Point& x, double k) const {
    const double phase = k * (x[0] * direction[0] + x[1] * direction[1] + x[2] * direction[2]);
    return {std::cos(phase), std::sin(phase)};
}

IncidentField make_plane_wave(int dim, const Point& d) {
    if (dim < 1 || dim > 3) throw DomainError("make_plane_wave: dim must be 1, 2 or 3");
    double norm = 0.0;
    for (int a = 0; a < dim; ++a) norm += d[a] * d[a];
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("make_plane_wave: zero direction");
    IncidentField f;
    f.direction = {0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) f.direction[a] = d[a] / norm;
    return f;
}

// ---------------------------------------------------------------- kernel table

RadialKernelTable::RadialKernelTable(const Problem& p, double r_lo, double r_hi, const QuadratureSpec& spec)
    : p_(p), spec_(spec), r_lo_(r_lo), r_hi_(r_hi) {
    p_.validate();
    spec_.validate();
    if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw DomainError("RadialKernelTable: need 0 < r_lo < r_hi");
    shift_ = make_shift(p_, 0.0);

    // geometric near the origin, then width <= 2/k
    edges_.push_back(r_lo);
    double a = r_lo;
    while (a < r_hi) {
        const double w = std::min(a, 2.0 / p_.k);
        double b = a + w;
        if (b > r_hi || r_hi - b < 0.25 * w) b = r_hi;
        edges_.push_back(b);
        a = b;
    }
    const Rule& g = gl16();
    ref_nodes_ = g.x;
    ref_weights_ = g.w;
    bary_.resize(kNodes);
    for (int j = 0; j < kNodes; ++j) {
        double prod = 1.0;
        for (int i = 0; i < kNodes; ++i)
            if (i != j) prod *= (ref_nodes_[j] - ref_nodes_[i]);
        bary_[j] = 1.0 / prod;
    }

    const std::size_t np = panel_count();
    g_.assign(np * kNodes, 0.0);
    parallel_for(np * kNodes, [&](std::size_t idx) {
        const std::size_t pnl = idx / kNodes, j = idx % kNodes;
        const double mid = 0.5 * (edges_[pnl] + edges_[pnl + 1]), half = 0.5 * (edges_[pnl + 1] - edges_[pnl]);
        g_[idx] = green_eval(p_, shift_, mid + half * ref_nodes_[j], spec_).total;
    });

    const int n1 = p_.n - 1;
    phi_.assign(np * kNodes, 0.0);
    cplx start = phi_direct(r_lo);
    for (std::size_t pnl = 0; pnl < np; ++pnl) {
        const double a0 = edges_[pnl];
        for (int j = 0; j < kNodes; ++j) {
            const double mid = 0.5 * (edges_[pnl] + edges_[pnl + 1]),
                         half = 0.5 * (edges_[pnl + 1] - edges_[pnl]);
            const double xj = mid + half * ref_nodes_[j];
            const double m2 = 0.5 * (a0 + xj), h2 = 0.5 * (xj - a0);
            cplx acc = 0.0;
            for (int i = 0; i < kNodes; ++i) {
                const double rho = m2 + h2 * ref_nodes_[i];
                acc += ref_weights_[i] * h2 * interp(g_, pnl, rho) * std::pow(rho, n1);
            }
            phi_[pnl * kNodes + j] = start + acc;
        }
        const double mid = 0.5 * (edges_[pnl] + edges_[pnl + 1]), half = 0.5 * (edges_[pnl + 1] - edges_[pnl]);
        cplx full = 0.0;
        for (int i = 0; i < kNodes; ++i)
            full += ref_weights_[i] * half * g_[pnl * kNodes + i] * std::pow(mid + half * ref_nodes_[i], n1);
        start += full;
    }
}

std::size_t RadialKernelTable::panel_of(double r) const {
    auto it = std::upper_bound(edges_.begin(), edges_.end(), r);
    std::size_t p = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - edges_.begin() - 1, 0));
    return std::min(p, panel_count() - 1);
}

cplx RadialKernelTable::interp(const std::vector<cplx>& vals, std::size_t panel, double r) const {
    const double mid = 0.5 * (edges_[panel] + edges_[panel + 1]),
                 half = 0.5 * (edges_[panel + 1] - edges_[panel]);
    const double t = (r - mid) / half;
    cplx num = 0.0;
    double den = 0.0;
    for (int j = 0; j < kNodes; ++j) {
        const double diff = t - ref_nodes_[j];
        if (diff == 0.0) return vals[panel * kNodes + j];
        const double w = bary_[j] / diff;
        num += w * vals[panel * kNodes + j];
        den += w;
    }
    return num / den;
}

cplx RadialKernelTable::value(double r) const {
    if (r >= r_lo_ && r <= r_hi_) return interp(g_, panel_of(r), r);
    return green_eval(p_, shift_, r, spec_).total;
}

cplx RadialKernelTable::phi(double R) const {
    if (!(R > 0.0)) return 0.0;
    if (R < r_lo_) {
        // below the table the leading term of the expansion at 0 is enough:
        // the neglected part is O(r_lo^{2s}) relative to Phi(R) itself
        const cplx at_lo = interp(phi_, 0, r_lo_);
        const double s = p_.s;
        if (p_.n == 1 && std::abs(s - 0.5) < kRegimeSnapTol) {
            const double lead = -(R * std::log(R) - R) / kPi, lead_lo = -(r_lo_ * std::log(r_lo_) - r_lo_) / kPi;
            return lead + (at_lo - lead_lo) * (R / r_lo_);
        }
        if (p_.n > 2.0 * s) return at_lo * std::pow(R / r_lo_, 2.0 * s);
        return at_lo * (R / r_lo_);
    }
    if (R <= r_hi_) return interp(phi_, panel_of(R), R);
    const cplx at_hi = interp(phi_, panel_count() - 1, r_hi_);
    const int n1 = p_.n - 1;
    QuadResult q = integrate_adaptive([&](double rho) { return value(rho) * std::pow(rho, n1); }, r_hi_, R,
                                      spec_);
    return at_hi + q.value;
}

cplx RadialKernelTable::phi_direct(double R) const {
    if (!(R > 0.0)) return 0.0;
    const int n = p_.n;
    const double s = p_.s;
    const bool log_case = n == 1 && std::abs(s - 0.5) < kRegimeSnapTol;
    const bool power_case = !log_case && n > 2.0 * s;
    double c = 0.0;
    cplx analytic = 0.0;
    if (power_case) {
        c = riesz_constant(n, s, 0);
        analytic = c * std::pow(R, 2.0 * s) / (2.0 * s);
    } else if (log_case) {
        analytic = -(R * std::log(R) - R) / kPi;
    }
    auto remainder = [&](double rho) -> cplx {
        const cplx g = green_eval(p_, shift_, rho, spec_).total;
        if (power_case) return g - c * std::pow(rho, -(n - 2.0 * s));
        if (log_case) return g + std::log(rho) / kPi;
        return g;
    };
    QuadratureSpec loc = spec_;
    loc.abs_tol = std::max(spec_.abs_tol, 1e-14 * std::abs(analytic));
    QuadResult q;
    if (n >= 2.0 * s && !log_case) {
        // u = rho^{2s} takes the r^{2s-n} weight out of the integrand
        const double inv = 1.0 / (2.0 * s);
        q = integrate_adaptive(
            [&](double u) {
                const double rho = std::pow(u, inv);
                return remainder(rho) * std::pow(rho, n - 2.0 * s) * inv;
            },
            0.0, std::pow(R, 2.0 * s), loc);
    } else {
        q = integrate_adaptive([&](double rho) { return remainder(rho) * std::pow(rho, n - 1); }, 0.0, R, loc);
    }
    return analytic + q.value;
}

cplx cell_integral(const RadialKernelTable& G, const Point& c, const Point& h, const Point& x, int panels) {
    const int n = G.problem().n;
    if (panels < 1) throw DomainError("cell_integral: panels must be positive");
    cplx total = 0.0;
    for (int a = 0; a < n; ++a) {
        for (double side : {-1.0, 1.0}) {
            const double face = c[a] + side * 0.5 * h[a];
            const double d = side * (face - x[a]);
            if (std::abs(d) <= 1e-14 * h[a]) continue;  // x lies in this face's plane
            const double ad = std::abs(d), sd = sgn(d);
            if (n == 1) {
                total += sd * G.phi(ad);
            } else if (n == 2) {
                const int b = 1 - a;
                const double t0 = c[b] - 0.5 * h[b] - x[b], t1 = c[b] + 0.5 * h[b] - x[b];
                const cplx q = sgn(t1) * radial_face(G, ad, std::abs(t1), false, panels) -
                               sgn(t0) * radial_face(G, ad, std::abs(t0), false, panels);
                total += sd * q;
            } else {
                const int b = (a + 1) % 3, e = (a + 2) % 3;
                const double u0 = c[b] - 0.5 * h[b] - x[b], u1 = c[b] + 0.5 * h[b] - x[b];
                const double v0 = c[e] - 0.5 * h[e] - x[e], v1 = c[e] + 0.5 * h[e] - x[e];
                auto F = [&](double u, double v) {
                    return sgn(u) * sgn(v) * corner_rect(G, ad, std::abs(u), std::abs(v), panels);
                };
                total += sd * (F(u1, v1) - F(u0, v1) - F(u1, v0) + F(u0, v0));
            }
        }
    }
    return total;
}

// ---------------------------------------------------------------- assembly

namespace {

double dist(const Point& x, const Point& y) {
    return std::sqrt((x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]) +
                     (x[2] - y[2]) * (x[2] - y[2]));
}

std::shared_ptr<const RadialKernelTable> kernel_for(const Problem& p, const PotentialGrid& g,
                                                    const ScatterOptions& opt) {
    double hmin = 1e300, hmax = 0.0, diam2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        hmin = std::min(hmin, g.h[a]);
        hmax = std::max(hmax, g.h[a]);
        diam2 += (g.hi[a] - g.lo[a]) * (g.hi[a] - g.lo[a]);
    }
    const double reach = (opt.near_cells + 1.0) * hmax * std::sqrt(static_cast<double>(g.dim));
    const double r_hi = 1.01 * std::max(std::sqrt(diam2), reach);
    return std::make_shared<RadialKernelTable>(p, 1e-8 * hmin, r_hi, opt.quad);
}

bool is_near(const PotentialGrid& g, const Point& x, const Point& y, int near_cells) {
    for (int a = 0; a < g.dim; ++a)
        if (std::abs(x[a] - y[a]) > (near_cells + 0.5) * g.h[a]) return false;
    return true;
}

}  // namespace

cplx volume_potential(const RadialKernelTable& G, const PotentialGrid& g, const std::vector<cplx>& density,
                      const Point& x, const ScatterOptions& opt) {
    if (density.size() != g.size()) throw DomainError("volume_potential: density size mismatch");
    std::vector<cplx> part(g.size(), 0.0);
    parallel_for(g.size(), [&](std::size_t j) {
        if (density[j] == 0.0) return;
        const Point& y = g.nodes[j];
        const cplx w = is_near(g, x, y, opt.near_cells) ? cell_integral(G, y, g.h, x, opt.local_panels)
                                                         : g.cell_volume * G.value(dist(x, y));
        part[j] = w * density[j];
    });
    cplx sum = 0.0;
    for (const cplx& v : part) sum += v;
    return sum;
}

NystromSystem build_nystrom(const Problem& p, const PotentialGrid& pot, const ScatterOptions& opt) {
    p.validate();
    pot.validate();
    opt.quad.validate();
    if (p.n != pot.dim) throw DomainError("build_nystrom: problem and grid dimensions differ");
    if (opt.local_panels < 1 || opt.near_cells < 0) throw DomainError("build_nystrom: bad local rule");

    NystromSystem sys;
    sys.problem = p;
    sys.grid = std::make_shared<PotentialGrid>(pot);
    sys.options = opt;
    const std::size_t N = pot.size();
    sys.size = N;
    sys.matrix.assign(N * N, 0.0);
    for (std::size_t i = 0; i < N; ++i) sys.matrix[i * N + i] = 1.0;
    if (pot.q_sup == 0.0) return sys;  // A = I, no kernel needed

    sys.kernel = kernel_for(p, pot, opt);
    const RadialKernelTable& G = *sys.kernel;
    const int n = pot.dim, cells = pot.cells_per_axis;

    // weights depend only on the absolute index offset
    std::size_t noff = 1;
    for (int a = 0; a < n; ++a) noff *= static_cast<std::size_t>(cells);
    std::vector<cplx> W(noff, 0.0);
    std::vector<char> near(noff, 0);
    const Point origin{0.0, 0.0, 0.0};
    parallel_for(noff, [&](std::size_t o) {
        std::size_t rest = o;
        Point c{0.0, 0.0, 0.0};
        int maxoff = 0;
        for (int a = 0; a < n; ++a) {
            const int d = static_cast<int>(rest % cells);
            rest /= cells;
            c[a] = d * pot.h[a];
            maxoff = std::max(maxoff, d);
        }
        if (maxoff <= opt.near_cells) {
            near[o] = 1;
            W[o] = cell_integral(G, c, pot.h, origin, opt.local_panels);
        } else {
            W[o] = pot.cell_volume * G.value(dist(c, origin));
        }
    });
    for (std::size_t o = 0; o < noff; ++o) {
        if (!near[o]) continue;
        NearCorrection nc;
        std::size_t rest = o;
        Point c{0.0, 0.0, 0.0};
        for (int a = 0; a < n; ++a) {
            nc.offset[a] = static_cast<int>(rest % cells);
            rest /= cells;
            c[a] = nc.offset[a] * pot.h[a];
        }
        nc.weight = W[o];
        if (o != 0) nc.midpoint_weight = pot.cell_volume * G.value(dist(c, origin));
        sys.corrections.push_back(nc);
    }

    const double k2s = std::pow(p.k, 2.0 * p.s);
    parallel_for(N, [&](std::size_t i) {
        const auto ii = pot.cell_index(i);
        for (std::size_t j = 0; j < N; ++j) {
            if (pot.q_values[j] == 0.0) continue;
            const auto jj = pot.cell_index(j);
            std::size_t o = 0, stride = 1;
            for (int a = 0; a < n; ++a) {
                o += static_cast<std::size_t>(std::abs(ii[a] - jj[a])) * stride;
                stride *= static_cast<std::size_t>(cells);
            }
            sys.matrix[i * N + j] -= k2s * W[o] * pot.q_values[j];
        }
    });
    return sys;
}

// ---------------------------------------------------------------- solve

namespace {

using MatC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VecC = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

MatC as_matrix(const NystromSystem& sys) {
    const auto n = static_cast<Eigen::Index>(sys.size);
    return Eigen::Map<const MatC>(sys.matrix.data(), n, n);
}

double smallest_singular_value(const Eigen::PartialPivLU<MatC>& lu, Eigen::Index n) {
    std::mt19937_64 rng(20260917);
    std::normal_distribution<double> nd;
    VecC x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = cplx(nd(rng), nd(rng));
    x.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 60; ++it) {
        VecC z = lu.solve(VecC(lu.adjoint().solve(x)));
        const double next = z.norm();
        x = z / next;
        if (it > 2 && std::abs(next - lambda) <= 1e-10 * next) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return 1.0 / std::sqrt(lambda);
}

}  // namespace

ScatterSolution solve_ls(const NystromSystem& sys, const IncidentField& inc) {
    inc.validate(sys.problem.n);
    const PotentialGrid& g = *sys.grid;
    const auto n = static_cast<Eigen::Index>(sys.size);
    VecC b(n);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = inc.value(g.nodes[i], sys.problem.k);

    ScatterSolution sol;
    sol.problem = sys.problem;
    sol.grid = sys.grid;
    sol.kernel = sys.kernel;
    sol.options = sys.options;
    const MatC A = as_matrix(sys);
    Eigen::PartialPivLU<MatC> lu(A);
    sol.rcond = lu.rcond();
    if (!(sol.rcond >= kResonanceRcond))
        throw NearResonanceError("solve_ls: system matrix is numerically singular", sol.rcond);
    VecC u = lu.solve(b);
    VecC res = A * u - b;
    u -= lu.solve(res);  // one refinement step
    res = A * u - b;
    sol.residual = res.norm() / b.norm();
    sol.u_total.assign(u.data(), u.data() + n);
    return sol;
}

cplx eval_scattered(const ScatterSolution& sol, const Point& x) {
    const PotentialGrid& g = *sol.grid;
    std::vector<cplx> density(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) density[j] = g.q_values[j] * sol.u_total[j];
    if (!sol.kernel) return 0.0;
    return std::pow(sol.problem.k, 2.0 * sol.problem.s) * volume_potential(*sol.kernel, g, density, x, sol.options);
}

FieldGradient eval_scattered_gradient(const ScatterSolution& sol, const Point& x) {
    const PotentialGrid& g = *sol.grid;
    FieldGradient out;
    if (!sol.kernel) return out;
    const int n = g.dim;
    bool far = true;
    for (const Point& y : g.nodes) far = far && !is_near(g, x, y, sol.options.near_cells);
    if (!far) {
        // central differences; the near-field weights are not differentiated analytically
        out.value = eval_scattered(sol, x);
        for (int a = 0; a < n; ++a) {
            const double step = 1e-4 * g.h[a];
            Point xp = x, xm = x;
            xp[a] += step;
            xm[a] -= step;
            out.grad[a] = (eval_scattered(sol, xp) - eval_scattered(sol, xm)) / (2.0 * step);
        }
        return out;
    }
    const Problem& p = sol.problem;
    const SpectralShift sh = make_shift(p, 0.0);
    std::vector<FieldGradient> part(g.size());
    parallel_for(g.size(), [&](std::size_t j) {
        const cplx dens = g.q_values[j] * sol.u_total[j];
        if (dens == 0.0) return;
        const Point& y = g.nodes[j];
        const double r = dist(x, y);
        const cplx gv = sol.kernel->value(r);
        const cplx gd = green_radial_derivative(p, sh, r).total;
        part[j].value = g.cell_volume * gv * dens;
        for (int a = 0; a < n; ++a) part[j].grad[a] = g.cell_volume * gd * ((x[a] - y[a]) / r) * dens;
    });
    const double k2s = std::pow(p.k, 2.0 * p.s);
    for (const auto& c : part) {
        out.value += k2s * c.value;
        for (int a = 0; a < n; ++a) out.grad[a] += k2s * c.grad[a];
    }
    return out;
}

cplx born_approx(const NystromSystem& sys, const IncidentField& inc, const Point& x) {
    inc.validate(sys.problem.n);
    const PotentialGrid& g = *sys.grid;
    if (!sys.kernel) return 0.0;
    std::vector<cplx> density(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) density[j] = g.q_values[j] * inc.value(g.nodes[j], sys.problem.k);
    return std::pow(sys.problem.k, 2.0 * sys.problem.s) * volume_potential(*sys.kernel, g, density, x, sys.options);
}

cplx born_approx(const Problem& p, const PotentialGrid& pot, const IncidentField& inc, const Point& x,
                 const ScatterOptions& opt) {
    p.validate();
    pot.validate();
    inc.validate(p.n);
    if (p.n != pot.dim) throw DomainError("born_approx: problem and grid dimensions differ");
    if (pot.q_sup == 0.0) return 0.0;
    const auto G = kernel_for(p, pot, opt);
    std::vector<cplx> density(pot.size());
    for (std::size_t j = 0; j < pot.size(); ++j) density[j] = pot.q_values[j] * inc.value(pot.nodes[j], p.k);
    return std::pow(p.k, 2.0 * p.s) * volume_potential(*G, pot, density, x, opt);
}

std::vector<cplx> neumann_series(const NystromSystem& sys, const IncidentField& inc, int terms) {
    inc.validate(sys.problem.n);
    if (terms < 1) throw DomainError("neumann_series: need at least one term");
    const auto n = static_cast<Eigen::Index>(sys.size);
    const MatC A = as_matrix(sys);
    VecC term(n);
    for (Eigen::Index i = 0; i < n; ++i) term[i] = inc.value(sys.grid->nodes[i], sys.problem.k);
    VecC acc = term;
    for (int m = 1; m < terms; ++m) {
        term = VecC(term - A * term);  // (I - A) = k^{2s} T_k
        acc += term;
    }
    return std::vector<cplx>(acc.data(), acc.data() + n);
}

std::vector<ResonanceSample> resonance_scan(const Problem& tmpl, const PotentialGrid& pot,
                                            const std::vector<double>& k_grid, const ScatterOptions& opt) {
    std::vector<ResonanceSample> out;
    out.reserve(k_grid.size());
    for (double k : k_grid) {
        if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("resonance_scan: k must be positive");
        Problem p = tmpl;
        p.k = k;
        const NystromSystem sys = build_nystrom(p, pot, opt);
        const MatC A = as_matrix(sys);
        Eigen::PartialPivLU<MatC> lu(A);
        ResonanceSample smp;
        smp.k = k;
        smp.rcond = lu.rcond();
        smp.sigma_min = smallest_singular_value(lu, A.rows());
        out.push_back(smp);
    }
    return out;
}

}  // namespace frachelm
