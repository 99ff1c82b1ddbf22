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


#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "frachelm/green.hpp"

namespace frachelm {

using Point = std::array<double, 3>;  // unused trailing coordinates are zero

struct PotentialGrid {
    int dim = 2;
    Point lo{}, hi{};
    int cells_per_axis = 1;
    Point h{};  // cell widths; zero on unused axes
    double cell_volume = 0.0;
    std::vector<Point> nodes;  // cell midpoints, axis 0 fastest
    std::vector<double> q_values;
    double q_sup = 0.0;

    void validate() const;
    std::size_t size() const { return nodes.size(); }
    std::array<int, 3> cell_index(std::size_t node) const;
};

PotentialGrid make_potential_grid(int dim, const Point& lo, const Point& hi, int cells,
                                  const std::function<double(const Point&)>& q);
PotentialGrid make_potential_grid(int dim, const Point& lo, const Point& hi, int cells,
                                  std::vector<double> q_values);

struct IncidentField {
    Point direction{1.0, 0.0, 0.0};

    void validate(int dim) const;
    cplx value(const Point& x, double k) const;
};

// Normalises d; throws DomainError on a zero vector.
IncidentField make_plane_wave(int dim, const Point& d);

// Piecewise polynomial interpolant of r -> G(r) at eps = 0 together with
// Phi(R) = int_0^R G(rho) rho^{n-1} drho. G outside [r_lo, r_hi] is evaluated
// directly; Phi below r_lo follows the leading power (or log) law.
class RadialKernelTable {
public:
    static constexpr int kNodes = 16;

    RadialKernelTable(const Problem& p, double r_lo, double r_hi,
                      const QuadratureSpec& spec = default_green_spec());

    cplx value(double r) const;
    cplx phi(double R) const;
    cplx phi_direct(double R) const;  // singular quadrature, no table

    const Problem& problem() const { return p_; }
    double r_lo() const { return r_lo_; }
    double r_hi() const { return r_hi_; }
    std::size_t panel_count() const { return edges_.size() - 1; }

private:
    std::size_t panel_of(double r) const;
    cplx interp(const std::vector<cplx>& vals, std::size_t panel, double r) const;

    Problem p_;
    SpectralShift shift_;
    QuadratureSpec spec_;
    double r_lo_, r_hi_;
    std::vector<double> edges_;
    std::vector<cplx> g_, phi_;  // kNodes per panel
    std::vector<double> ref_nodes_, ref_weights_, bary_;
};

// int over the box cell (center c, widths h) of G(|y - x|) dy, for any x not on
// the cell boundary. `panels` sets the local rule resolution.
cplx cell_integral(const RadialKernelTable& G, const Point& c, const Point& h, const Point& x, int panels = 2);

struct ScatterOptions {
    QuadratureSpec quad = default_green_spec();
    int local_panels = 2;
    int near_cells = 2;  // cells within this many steps (max norm) get local integration
};

struct NearCorrection {
    std::array<int, 3> offset{};
    cplx weight{0.0, 0.0};           // corrected integral of G over the cell
    cplx midpoint_weight{0.0, 0.0};  // cell_volume * G(offset); zero for the self cell
};

struct NystromSystem {
    Problem problem;
    std::shared_ptr<const PotentialGrid> grid;
    std::shared_ptr<const RadialKernelTable> kernel;
    ScatterOptions options;
    std::size_t size = 0;
    std::vector<cplx> matrix;  // row-major I - k^{2s} T_k
    std::vector<NearCorrection> corrections;

    cplx at(std::size_t i, std::size_t j) const { return matrix[i * size + j]; }
};

// sum_j w_j(x) density_j over the grid cells (no k^{2s} factor): locally
// corrected cell integrals within opt.near_cells of x, midpoint beyond.
cplx volume_potential(const RadialKernelTable& G, const PotentialGrid& grid, const std::vector<cplx>& density,
                      const Point& x, const ScatterOptions& opt = {});

NystromSystem build_nystrom(const Problem& p, const PotentialGrid& pot, const ScatterOptions& opt = {});

struct ScatterSolution {
    Problem problem;
    std::shared_ptr<const PotentialGrid> grid;
    std::shared_ptr<const RadialKernelTable> kernel;
    ScatterOptions options;
    std::vector<cplx> u_total;
    double residual = 0.0;
    double rcond = 1.0;
};

inline constexpr double kResonanceRcond = 1e-12;

ScatterSolution solve_ls(const NystromSystem& sys, const IncidentField& inc);

// k^{2s} sum_j w_j(x) q_j u_j with locally corrected weights near the nodes.
cplx eval_scattered(const ScatterSolution& sol, const Point& x);

struct FieldGradient {
    cplx value{0.0, 0.0};
    std::array<cplx, 3> grad{};
};

FieldGradient eval_scattered_gradient(const ScatterSolution& sol, const Point& x);

cplx born_approx(const Problem& p, const PotentialGrid& pot, const IncidentField& inc, const Point& x,
                 const ScatterOptions& opt = {});
cplx born_approx(const NystromSystem& sys, const IncidentField& inc, const Point& x);

// Partial sums of sum_m (k^{2s} T_k)^m u^inc at the nodes.
std::vector<cplx> neumann_series(const NystromSystem& sys, const IncidentField& inc, int terms);

struct ResonanceSample {
    double k = 0.0;
    double rcond = 1.0;
    double sigma_min = 1.0;  // reported indicator
};

std::vector<ResonanceSample> resonance_scan(const Problem& tmpl, const PotentialGrid& pot,
                                            const std::vector<double>& k_grid, const ScatterOptions& opt = {});

}  // namespace frachelm
