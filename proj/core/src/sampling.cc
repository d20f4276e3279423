// sfst/sampling.cc
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

#include "sfst/sampling.h"

#include <cmath>
#include <string>

#include "sfst/error.h"
#include "sfst/semiring.h"

namespace sfst {

std::vector<int> CheckLocallyNormalized(const Wfst& fst, double tolerance) {
  std::vector<int> violations;
  for (int q = 0; q < fst.NumStates(); ++q) {
    Weight outflow = fst.Final(q);
    for (const Arc& arc : fst.Arcs(q)) outflow += arc.weight;
    if (std::abs(outflow - SemiringOne()) > tolerance) violations.push_back(q);
  }
  return violations;
}

PathSampler::PathSampler(const Wfst& fst, const SampleOptions& options)
    : fst_(fst), options_(options) {
  if (!fst.HasStart()) {
    throw EmptyAutomatonError("cannot sample: automaton has no start state");
  }
  const std::vector<int> violations = CheckLocallyNormalized(fst);
  if (!violations.empty()) {
    throw NotNormalizedError(
        "cannot sample: " + std::to_string(violations.size()) +
        " state(s) are not locally normalized, first is state " +
        std::to_string(violations.front()));
  }
  if (!options.allow_epsilon_cycles && !IsEpsilonAcyclic(fst)) {
    throw EpsilonCyclicError(
        "cannot sample: epsilon subgraph is cyclic; conflate first");
  }
}

Path PathSampler::SamplePath(Rng& rng) {
  Path path;
  path.start = fst_.Start();
  int state = fst_.Start();
  for (long long step = 0; step < options_.max_steps; ++step) {
    const Weight final_weight = fst_.Final(state);
    const auto& arcs = fst_.Arcs(state);
    const double u = rng.Uniform();
    double cumulative = final_weight;
    if (u < cumulative) return path;
    int chosen = -1;
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
      cumulative += arcs[i].weight;
      if (u < cumulative) {
        chosen = i;
        break;
      }
    }
    if (chosen < 0) {
      // Residual bucket: normalization slack within tolerance.
      if (final_weight > 0) return path;
      if (arcs.empty()) {
        throw SfstError("internal: dead-end state " + std::to_string(state) +
                        " escaped normalization validation");
      }
      chosen = static_cast<int>(arcs.size()) - 1;
    }
    path.arcs.push_back(arcs[chosen]);
    state = arcs[chosen].target;
  }
  throw StepLimitExceededError(
      "sampling exceeded " + std::to_string(options_.max_steps) +
      " steps without terminating");
}

StringPair PathSampler::SampleStringPair(Rng& rng) {
  const Path path = SamplePath(rng);
  return StringPair{PathInputLabels(path), PathOutputLabels(path)};
}

Path RandPath(const Wfst& fst, Rng& rng, const SampleOptions& options) {
  PathSampler sampler(fst, options);
  return sampler.SamplePath(rng);
}

StringPair RandStringPair(const Wfst& fst, Rng& rng,
                          const SampleOptions& options) {
  PathSampler sampler(fst, options);
  return sampler.SampleStringPair(rng);
}

}  // namespace sfst
