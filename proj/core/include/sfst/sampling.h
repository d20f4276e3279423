// sfst/sampling.h
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
// Random path and string-pair sampling from locally normalized automata.

#ifndef SFST_SAMPLING_H_
#define SFST_SAMPLING_H_

#include <cstdint>
#include <random>
#include <vector>

#include "sfst/fst.h"

namespace sfst {

// Seedable deterministic generator: identical seeds give bit-identical draw
// sequences. The algorithm identifier names the exact scheme for records
// that must be reproducible later.
class Rng {
 public:
  static constexpr const char* kAlgorithmId = "mt19937_64/u53";

  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

// Epsilon-free input and output label sequences of a sampled path.
struct StringPair {
  std::vector<Label> input;
  std::vector<Label> output;

  friend bool operator==(const StringPair&, const StringPair&) = default;
};

inline constexpr double kLocalNormalizationTolerance = 1e-6;

// States whose outflow f(q) + sum of arc weights differs from 1 by more
// than `tolerance`. An empty result means the automaton is sampleable.
std::vector<int> CheckLocallyNormalized(
    const Wfst& fst, double tolerance = kLocalNormalizationTolerance);

struct SampleOptions {
  // Lifts the epsilon-cyclicity guard for diagnostics; sampling then relies
  // on the step cap alone.
  bool allow_epsilon_cycles = false;
  // Hard bound on draw steps per path, guard or no guard.
  long long max_steps = 1000000;
};

// Draws successful paths with probability equal to their weight. Validation
// happens once at construction: NotNormalizedError when a state's outflow is
// off by more than the tolerance, EpsilonCyclicError when the epsilon graph
// is cyclic and the guard is active, EmptyAutomatonError without a start
// state. The referenced automaton must outlive the sampler.
class PathSampler {
 public:
  explicit PathSampler(const Wfst& fst, const SampleOptions& options = {});

  // One categorical draw per visited state over [f(q), w(e1), w(e2), ...] in
  // arc order; residual probability mass goes to termination when f(q) > 0,
  // else to the last arc. Throws StepLimitExceededError past the step cap.
  Path SamplePath(Rng& rng);
  StringPair SampleStringPair(Rng& rng);

 private:
  const Wfst& fst_;
  SampleOptions options_;
};

// One-shot conveniences; construct a PathSampler for repeated draws.
Path RandPath(const Wfst& fst, Rng& rng, const SampleOptions& options = {});
StringPair RandStringPair(const Wfst& fst, Rng& rng,
                          const SampleOptions& options = {});

}  // namespace sfst

#endif  // SFST_SAMPLING_H_
