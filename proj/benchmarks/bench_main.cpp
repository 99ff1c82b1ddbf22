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

#include <benchmark/benchmark.h>

#include "frachelm/oracle.hpp"
#include "frachelm/scattering.hpp"
#include "frachelm/specfun.hpp"

using namespace frachelm;

static void BM_Hankel(benchmark::State& st) {
    const cplx z(7.3, 0.4);
    for (auto _ : st) benchmark::DoNotOptimize(hankel1_0(z));
}
BENCHMARK(BM_Hankel);

static void BM_StruveK0(benchmark::State& st) {
    const cplx z(3.1, 0.2);
    for (auto _ : st) benchmark::DoNotOptimize(struve_k0(z));
}
BENCHMARK(BM_StruveK0);

// args: dimension, 100*s
static void BM_GreenEval(benchmark::State& st) {
    const Problem p = make_problem(static_cast<int>(st.range(0)), st.range(1) / 100.0, 1.0);
    const SpectralShift sh = make_shift(p, 0.0);
    for (auto _ : st) benchmark::DoNotOptimize(green_eval(p, sh, 2.0));
}
BENCHMARK(BM_GreenEval)->ArgsProduct({{1, 2, 3}, {25, 30, 50, 75}})->Unit(benchmark::kMicrosecond);

static void BM_GreenDerivative(benchmark::State& st) {
    const Problem p = make_problem(static_cast<int>(st.range(0)), 0.3, 1.0);
    const SpectralShift sh = make_shift(p, 0.0);
    for (auto _ : st) benchmark::DoNotOptimize(green_radial_derivative(p, sh, 2.0));
}
BENCHMARK(BM_GreenDerivative)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);

static void BM_FourierInvert(benchmark::State& st) {
    const Problem p = make_problem(static_cast<int>(st.range(0)), 0.3, 1.0);
    const SpectralShift sh = make_shift(p, 0.3);
    for (auto _ : st) benchmark::DoNotOptimize(fourier_invert(p, sh, 2.0));
}
BENCHMARK(BM_FourierInvert)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_BuildNystrom2D(benchmark::State& st) {
    const Problem p = make_problem(2, 0.75, 1.0);
    const int cells = static_cast<int>(st.range(0));
    const PotentialGrid g = make_potential_grid(2, {-0.5, -0.5, 0}, {0.5, 0.5, 0}, cells, [](const Point&) { return 0.1; });
    for (auto _ : st) benchmark::DoNotOptimize(build_nystrom(p, g));
}
BENCHMARK(BM_BuildNystrom2D)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
