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

#include <doctest.h>

#include <cmath>

#include "frachelm/diagnostics.hpp"
#include "frachelm/specfun.hpp"

using namespace frachelm;

TEST_CASE("proven rates") {
    CHECK(theorem_rate(make_problem(1, 0.75, 1), false).rate == doctest::Approx(2.5));
    CHECK(theorem_rate(make_problem(3, 0.3, 1), false).rate == doctest::Approx(2.4));
    CHECK(theorem_rate(make_problem(3, 0.75, 1), false).rate == doctest::Approx(4.5));
    CHECK(theorem_rate(make_problem(2, 0.3, 1), false).rate == doctest::Approx(1.0));
    CHECK(theorem_rate(make_problem(1, 0.3, 1), true).rate == doctest::Approx(0.4));
    CHECK(theorem_rate(make_problem(1, 0.5, 1), true).log_weight);
    CHECK(theorem_rate(make_problem(3, 0.75, 1), true).rate == doctest::Approx(1.5));
}

TEST_CASE("envelope growth") {
    CHECK(envelope_growth({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}) == doctest::Approx(1.0));
    std::vector<double> up;
    for (int i = 0; i < 20; ++i) up.push_back(std::pow(2.0, i));
    CHECK(envelope_growth(up) > 1e4);
}

TEST_CASE("decay checks with negative control") {
    const Problem p = make_problem(1, 0.75, 1.0);
    RateCheckOptions o;
    o.samples = 12;
    const RateFit a = decay_rate_check(p, FieldPart::JTail, 10, 1e4, 2.5, o);
    CHECK(a.envelope_bounded);
    CHECK_FALSE(decay_rate_check(p, FieldPart::JTail, 10, 1e4, 3.5, o).envelope_bounded);
    const Problem q = make_problem(3, 0.3, 1.0);
    CHECK(decay_rate_check(q, FieldPart::JTail, 10, 1e4, 2.4, o).envelope_bounded);
    CHECK_THROWS_AS(decay_rate_check(p, FieldPart::JTail, 1, 1e4, 2.5, o), DomainError);
}

TEST_CASE("singularity checks") {
    RateCheckOptions o;
    o.samples = 12;
    CHECK(singularity_rate_check(make_problem(1, 0.3, 1), FieldPart::JTail, 1e-3, 0.5, 0.4, false, o).envelope_bounded);
    CHECK(singularity_rate_check(make_problem(1, 0.5, 1), FieldPart::JTail, 1e-3, 0.5, 0, true, o).envelope_bounded);
    CHECK(singularity_rate_check(make_problem(3, 0.75, 1), FieldPart::JTail, 1e-3, 0.5, 1.5, false, o).envelope_bounded);
    CHECK_FALSE(
        singularity_rate_check(make_problem(1, 0.3, 1), FieldPart::JTail, 1e-3, 0.5, -0.6, false, o).envelope_bounded);
}

TEST_CASE("radiation classification of Hankel waves") {
    RadiationOptions o;
    o.dim = 2;
    const auto out = radial_field(2, [](double r) { return std::pair<cplx, cplx>(hankel1_0(r), -hankel1_1(r)); });
    const auto in = radial_field(
        2, [](double r) { return std::pair<cplx, cplx>(std::conj(hankel1_0(r)), -std::conj(hankel1_1(r))); });
    const RadiationReport a = radiation_classify(out, o), b = radiation_classify(in, o);
    CHECK(a.verdict_src);
    CHECK(a.verdict_gsrc);
    CHECK_FALSE(b.verdict_src);
    CHECK_FALSE(b.verdict_gsrc);
}

TEST_CASE("radiation classification of G in 3D") {
    RadiationOptions o;
    o.dim = 3;
    o.angular = 8;
    o.polar = 4;
    o.radial_order = 8;
    o.radial_split = 2;
    const Problem p = make_problem(3, 0.3, 1.0);
    const SpectralShift sh = make_shift(p, 0.0);
    const auto g = radial_field(3, [=](double r) {
        return std::pair<cplx, cplx>(green_eval(p, sh, r).total, green_radial_derivative(p, sh, r).total);
    });
    const RadiationReport rep = radiation_classify(g, o);
    CHECK(rep.verdict_src);
    CHECK(rep.verdict_gsrc);
}

TEST_CASE("limiting absorption slope") {
    const LapFit a = lap_slope(make_problem(1, 0.3, 1.0), 2.0, {1e-1, 1e-2, 1e-3});
    CHECK(a.slope >= 0.8);
    CHECK(a.slope <= 1.2);
    const LapFit b = lap_slope(make_problem(3, 0.75, 1.0), 1.0, {1e-1, 1e-2, 1e-3});
    CHECK(b.slope >= 0.8);
    CHECK(b.slope <= 1.2);
    CHECK_THROWS(lap_slope(make_problem(1, 0.3, 1.0), 2.0, {0.0, 0.0}));
}

TEST_CASE("convolution norm") {
    const Problem p = make_problem(1, 0.3, 1.0);
    const Point lo{-0.5, 0, 0}, hi{0.5, 0, 0};
    const PotentialGrid one = make_potential_grid(1, lo, hi, 1, std::vector<double>{1.0});
    const ConvolutionNorm a = convolution_norm_check(p, one);
    CHECK(std::isfinite(a.ratio));
    CHECK(a.ratio > 0);
    const PotentialGrid two = make_potential_grid(1, lo, hi, 1, std::vector<double>{2.0});
    const ConvolutionNorm b = convolution_norm_check(p, two);
    CHECK(b.weighted_norm == doctest::Approx(2.0 * a.weighted_norm).epsilon(1e-12));
    CHECK(b.ratio == doctest::Approx(a.ratio).epsilon(1e-12));
    ConvolutionOptions o;
    o.truncation = 40;
    const ConvolutionNorm c = convolution_norm_check(p, one, o);
    CHECK(c.ratio == doctest::Approx(a.ratio).epsilon(0.1));
}
