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

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "frachelm/scattering.hpp"

namespace frachelm {

enum class FieldPart { JTail, NonHelmTotal };

const char* part_name(FieldPart part);
FieldPart parse_part(const std::string& name);

struct RateFit {
    std::vector<double> radii;   // increasing
    std::vector<double> values;  // |part| at eps = 0
    double slope = 0.0;          // least-squares d log|v| / d log r
    double claimed_rate = 0.0;
    bool log_weight = false;     // product uses 1/(-ln r) instead of r^rate
    double drift = 100.0;
    double envelope_ratio = 0.0;  // growth of the product along the approach
    bool envelope_bounded = false;
};

struct RateCheckOptions {
    int samples = 25;
    double drift = 100.0;
    QuadratureSpec quad = default_green_spec();
};

// Fits |part|·r^{claimed_rate} on a log grid over [r_min, r_max] and checks
// that it does not grow toward infinity by more than the drift factor. The
// reference is the largest product over the first tenth (in log r) of the window.
RateFit decay_rate_check(const Problem& p, FieldPart part, double r_min, double r_max, double claimed_rate,
                         const RateCheckOptions& opt = {});

// Mirror toward r -> 0 on a window inside (0, 0.5]. With log_weight the
// product is |part| / (-ln r) and claimed_rate is ignored.
RateFit singularity_rate_check(const Problem& p, FieldPart part, double r_min, double r_max, double claimed_rate,
                               bool log_weight = false, const RateCheckOptions& opt = {});

// Bound exponents for |G - helm - riesz| from the asymptotics theorem:
// toward infinity, or toward 0 (where n=1, s=1/2 is logarithmic).
struct ClaimedRate {
    double rate = 0.0;
    bool log_weight = false;
};
ClaimedRate theorem_rate(const Problem& p, bool toward_zero);

// Growth ratio used by both checks; products ordered along the approach.
double envelope_growth(const std::vector<double>& products);

struct FieldSample {
    cplx value{0.0, 0.0};
    std::array<cplx, 3> grad{};
};

using PointField = std::function<FieldSample(const Point&)>;

// Wraps a radial profile r -> (u, du/dr) as a point field. Values are cached
// by radius, so sphere quadratures cost one profile evaluation per radius.
PointField radial_field(int dim, std::function<std::pair<cplx, cplx>(double)> profile);

struct RadiationOptions {
    int dim = 3;
    double k = 1.0;
    double R0 = 10.0;
    double R_max = 10240.0;  // profile radii are R0 * 2^j up to R_max
    double delta = 0.75;
    int angular = 64;        // trapezoid points in the azimuth
    int polar = 32;          // Gauss-Legendre points in cos(theta), dim 3
    int radial_order = 16;   // Gauss-Legendre points per radial sub-panel
    int radial_split = 4;    // sub-panels per doubling
    double src_ratio = 0.1;
    double gsrc_tol = 0.05;
};

struct RadiationReport {
    std::vector<std::pair<double, double>> src_profile;   // (r, sphere mean of r^{(n-1)/2}|u_r - iku|)
    std::vector<std::pair<double, double>> gsrc_partial;  // (R, int_{R0<|x|<R} |grad u - ik xhat u|^2 w)
    double delta = 0.75;
    bool verdict_src = false;
    bool verdict_gsrc = false;
};

RadiationReport radiation_classify(const PointField& field, const RadiationOptions& opt);

struct LapFit {
    std::vector<double> eps;
    std::vector<double> diffs;  // |G(eps) - G(0)|
    std::vector<double> noise;  // combined quadrature error estimates
    double slope = 0.0;
};

// Log-log slope of |G_eps(r) - G_0(r)| against eps. Throws AccuracyError
// when any difference is below ten times its quadrature noise.
LapFit lap_slope(const Problem& p, double r, const std::vector<double>& eps_list,
                 const QuadratureSpec& spec = default_green_spec());

struct ConvolutionNorm {
    double weighted_norm = 0.0;  // ||G*f||_{L^{2,-delta}} over |x| < R
    double source_norm = 0.0;    // ||f||_{L^2}
    double ratio = 0.0;
};

struct ConvolutionOptions {
    double delta = 0.75;
    double truncation = 20.0;
    int radial_panels_per_unit = 1;
    int angular = 32;
    int polar = 16;
    ScatterOptions scatter;
};

ConvolutionNorm convolution_norm_check(const Problem& p, const PotentialGrid& f, const ConvolutionOptions& opt = {});

}  // namespace frachelm
