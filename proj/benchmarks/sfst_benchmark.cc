// sfst/sfst_benchmark.cc
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
//
// Microbenchmarks for the hot paths: algebraic distances, normalization,
// conflation, path sampling, and sampling-based decoding.

#include <benchmark/benchmark.h>

#include <vector>

#include "sfst/algebra.h"
#include "sfst/ctc.h"
#include "sfst/fst.h"
#include "sfst/sampling.h"

namespace sfst {
namespace {

// Ring of `n` states: an epsilon arc and a labeled arc to the next state,
// with outflow 0.9 and final weight 0.05 everywhere. Trim and convergent.
Wfst RingFst(int n) {
  Wfst fst;
  for (int q = 0; q < n; ++q) fst.AddState();
  fst.SetStart(0);
  for (int q = 0; q < n; ++q) {
    int next = (q + 1) % n;
    fst.AddArc(q, Arc{kEpsilon, kEpsilon, 0.45, next});
    fst.AddArc(q, Arc{1, 1, 0.45, next});
    fst.SetFinal(q, 0.05);
  }
  return fst;
}

// Uniform posterior over `symbols` labels (blank included) for `steps`
// frames.
CtcPosterior UniformPosterior(int steps, int symbols) {
  CtcPosterior posterior;
  posterior.blank = symbols - 1;
  for (int j = 0; j < symbols; ++j) {
    posterior.labels.push_back(j + 1 == symbols ? "-"
                                                : std::string(1, 'a' + j));
  }
  posterior.probs.assign(steps,
                         std::vector<double>(symbols, 1.0 / symbols));
  return posterior;
}

void BM_ShortestDistance(benchmark::State& state) {
  Wfst fst = RingFst(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ShortestDistance(fst, fst.Start()));
  }
}
BENCHMARK(BM_ShortestDistance)->Arg(16)->Arg(64)->Arg(256);

void BM_Normalize(benchmark::State& state) {
  Wfst fst = RingFst(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Normalize(fst));
  }
}
BENCHMARK(BM_Normalize)->Arg(16)->Arg(64)->Arg(256);

void BM_ConflateEpsilonCycle(benchmark::State& state) {
  int m = static_cast<int>(state.range(0));
  Wfst cycle;
  for (int q = 0; q < m; ++q) cycle.AddState();
  cycle.SetStart(0);
  cycle.SetFinal(0, 1.0);
  for (int q = 0; q < m; ++q) {
    cycle.AddArc(q, Arc{kEpsilon, kEpsilon, 0.9 / m, (q + 1) % m});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ConflateEpsilonCycles(cycle));
  }
}
BENCHMARK(BM_ConflateEpsilonCycle)->Arg(8)->Arg(32)->Arg(128);

void BM_SamplePath(benchmark::State& state) {
  Wfst fst = Normalize(RingFst(64));
  PathSampler sampler(fst);
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.SamplePath(rng));
  }
}
BENCHMARK(BM_SamplePath);

void BM_LabelingProbability(benchmark::State& state) {
  CtcPosterior posterior =
      UniformPosterior(static_cast<int>(state.range(0)), 4);
  Wfst lattice = BuildLattice(posterior);
  Wfst labeling_fst = BuildLabelingFst(posterior.labels, posterior.blank);
  Labeling ell = {1, 2, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(LabelingProbability(lattice, labeling_fst, ell));
  }
}
BENCHMARK(BM_LabelingProbability)->Arg(8)->Arg(32);

void BM_CtcDecode(benchmark::State& state) {
  CtcPosterior posterior =
      UniformPosterior(static_cast<int>(state.range(0)), 3);
  Wfst lattice = BuildLattice(posterior);
  Wfst labeling_fst = BuildLabelingFst(posterior.labels, posterior.blank);
  DecodeConfig config;
  config.max_draws = 200;
  config.theta = 0.01;
  config.strategy = DecodeStrategy::kSecondOccurrence;
  uint64_t seed = 0;
  for (auto _ : state) {
    config.seed = seed++;
    benchmark::DoNotOptimize(
        CtcDecode(lattice, labeling_fst, posterior.BlankLabel(), config));
  }
}
BENCHMARK(BM_CtcDecode)->Arg(4)->Arg(8);

}  // namespace
}  // namespace sfst

BENCHMARK_MAIN();
