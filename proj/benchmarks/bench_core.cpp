// Copyright 2026 The hsreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hsreg/data.hpp"
#include "hsreg/distributions.hpp"
#include "hsreg/features.hpp"
#include "hsreg/mlp.hpp"
#include "hsreg/special_functions.hpp"

namespace {

using namespace hsreg;

DenseMatrix random_batch(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  DenseMatrix x(rows, cols);
  for (double& v : x.flat()) v = z(rng);
  return x;
}

void BM_Forward(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  const MlpModel m = make_mlp(192, {width}, HeadSpec{{Link::kIdentity, Link::kSoftplus}}, 0.2, 1);
  const DenseMatrix x = random_batch(256, 192);
  for (auto _ : state) benchmark::DoNotOptimize(predict(m, x));
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_Forward)->Arg(128)->Arg(256)->Arg(512);

void BM_ForwardBackward(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  const MlpModel m = make_mlp(192, {width}, HeadSpec{{Link::kIdentity, Link::kSoftplus}}, 0.2, 1);
  const DenseMatrix x = random_batch(256, 192);
  const DenseMatrix g = random_batch(256, 2);
  ForwardOptions opts;
  opts.training = true;
  for (auto _ : state) {
    auto fr = forward(m, x, opts);
    benchmark::DoNotOptimize(backward(m, fr.tape, g));
    ++opts.mask_seed;
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_ForwardBackward)->Arg(128)->Arg(256)->Arg(512);

void BM_LogGamma(benchmark::State& state) {
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_gamma(x));
    x = x < 100.0 ? x * 1.01 : 0.5;
  }
}
BENCHMARK(BM_LogGamma);

void BM_Digamma(benchmark::State& state) {
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(digamma(x));
    x = x < 100.0 ? x * 1.01 : 0.5;
  }
}
BENCHMARK(BM_Digamma);

void BM_RegLowerGamma(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0));
  double x = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reg_lower_incomplete_gamma(a, x));
    x = x < 5.0 * a ? x * 1.05 : 0.01;
  }
}
BENCHMARK(BM_RegLowerGamma)->Arg(1)->Arg(20);

void BM_GammaQuantile(benchmark::State& state) {
  const auto d = PredictiveDistribution::gamma(static_cast<double>(state.range(0)), 0.1);
  double p = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(quantile(d, p));
    p = p < 0.98 ? p + 0.01 : 0.01;
  }
}
BENCHMARK(BM_GammaQuantile)->Arg(1)->Arg(20);

void BM_GammaNllGrad(benchmark::State& state) {
  const std::array<double, 2> raw = {2.0, -0.5};
  double y = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nll_and_grad(Family::kGamma, y, raw));
    y = y < 4.0 ? y + 0.01 : 0.5;
  }
}
BENCHMARK(BM_GammaNllGrad);

void BM_EncodeRecord(benchmark::State& state) {
  GeneratorConfig g;
  g.n_records = 2000;
  const Corpus c = generate(g);
  const FeatureSchema schema = fit_schema(c.records);
  std::vector<double> out(schema.width());
  std::size_t i = 0;
  for (auto _ : state) {
    schema.encode_into(c.records[i], out);
    benchmark::DoNotOptimize(out.data());
    i = (i + 1) % c.records.size();
  }
}
BENCHMARK(BM_EncodeRecord);

}  // namespace

BENCHMARK_MAIN();
