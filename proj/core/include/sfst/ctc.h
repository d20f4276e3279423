// sfst/ctc.h
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
// CTC decoding by sampling: lattice and labeling-transducer construction,
// exact labeling probabilities, and the sampling decoder with certainty and
// early-stopping exits.

#ifndef SFST_CTC_H_
#define SFST_CTC_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sfst/fst.h"

namespace sfst {

// Per-frame label posterior: T rows of L probabilities, one column per
// symbol, with one column designated as the blank.
struct CtcPosterior {
  std::vector<std::vector<double>> probs;
  std::vector<std::string> labels;
  int blank = -1;

  int NumSteps() const { return static_cast<int>(probs.size()); }
  int NumSymbols() const { return static_cast<int>(labels.size()); }
  // Column j of the matrix carries label id j + 1; epsilon stays reserved.
  Label LabelId(int column) const { return column + 1; }
  Label BlankLabel() const { return LabelId(blank); }
  std::shared_ptr<const SymbolTable> MakeSymbols() const;
};

// Throws InvalidPosteriorError unless: T >= 1, L >= 2, blank in range,
// unique whitespace-free names, entries in [0, 1], rows summing to 1 within
// 1e-6.
void ValidateCtcPosterior(const CtcPosterior& posterior);

// Reads either format and validates. Text: a first line `labels: <name> ...`
// with the blank name last, then T rows of L probabilities. JSON: an object
// {"labels": [...], "blank": <index>, "probs": [[...], ...]}. The leading
// character decides which parser runs.
CtcPosterior ReadCtcPosterior(std::istream& in);
CtcPosterior ReadCtcPosteriorFromString(const std::string& text);

// A blank-free sequence of non-epsilon labels.
using Labeling = std::vector<Label>;

// Collapses runs of repeated symbols, then removes blanks.
Labeling CollapseLabeling(const std::vector<Label>& symbols, Label blank);

// Chain acceptor with T+1 states; between consecutive states, one arc per
// symbol weighted by that row of the posterior. No epsilons; only the last
// state is final (weight 1); locally normalized by construction.
Wfst BuildLattice(const CtcPosterior& posterior);

// The path-to-labeling transducer: one state per non-blank symbol plus a
// start/blank state, all final with weight 1, one arc per (state, symbol)
// pair. Reading a symbol outputs it and moves to its state, except that a
// repeat within a run or a blank outputs epsilon; blanks return to the
// start state. Routing any symbol sequence through it yields exactly
// CollapseLabeling of that sequence.
Wfst BuildLabelingFst(const std::vector<std::string>& labels, int blank);

// labeling_fst composed with the linear chain of `ell`: accepts on its input
// tape exactly the symbol sequences that collapse to `ell`. Size is linear
// in |ell|.
Wfst PreimageFst(const Wfst& labeling_fst, const Labeling& ell);

// Exact posterior mass of `ell`: the grand total of the lattice composed
// with the preimage of `ell`.
Weight LabelingProbability(const Wfst& lattice, const Wfst& labeling_fst,
                           const Labeling& ell);

// Probability that an unseen labeling beats the best seen one: for the
// unseen mode P0 ~ Beta(1, n+1) after n draws, Pr(p_star <= P0 <= 1-t) =
// (1-p_star)^(n+1) - t^(n+1), floored at zero.
double UnseenModeProb(double p_star, double t, int n);

// Pr(p_star <= P_c <= 1-t) for P_c ~ Beta(c+1, n-c+2): the chance that a
// labeling seen c times in n draws carries enough mass to matter. Evaluated
// exactly through the binomial form of the Beta CDF at integer parameters.
double OccurrenceExceedProb(int c, int n, double p_star, double t);

enum class DecodeStrategy { kNever, kAlways, kSecondOccurrence, kBetaTest };

enum class StopReason { kModeCertain, kEarlyStopped, kDrawsExhausted };

const char* StopReasonName(StopReason reason);

struct DecodeConfig {
  long long max_draws = 0;
  double theta = 0.0;
  DecodeStrategy strategy = DecodeStrategy::kSecondOccurrence;
  uint64_t seed = 0;
};

struct DecodeResult {
  Labeling labeling;
  // Exact probability of `labeling`; absent when the strategy never
  // evaluates probabilities.
  std::optional<double> probability;
  long long draws_used = 0;
  long long probs_computed = 0;
  // Total probability mass of the labelings evaluated so far (the residual
  // 1 - seen_mass bounds everything not yet seen).
  double seen_mass = 0.0;
  StopReason stop_reason = StopReason::kDrawsExhausted;
};

// Sampling-based decoding: seeds with the best path's labeling, evaluates
// its exact probability, then alternates sampling with strategy-gated
// probability evaluation until the mode is provably found (p* > 0.5 or
// p* > 1 - seen_mass), the unseen-mode probability drops below theta, or
// draws run out. kNever evaluates no probabilities at all and returns the
// most frequent sampled labeling, degenerating to naive decoding; with zero
// draws it degenerates to the best-path heuristic. Deterministic given
// config.seed. `blank` is the lattice's blank label id.
DecodeResult CtcDecode(const Wfst& lattice, const Wfst& labeling_fst,
                       Label blank, const DecodeConfig& config);

// Draws `draws` samples and returns the most frequent labeling (ties go to
// the lexicographically smallest). No probabilities are computed. Throws
// EmptySampleError when draws < 1.
DecodeResult NaiveDecode(const Wfst& lattice, Label blank, long long draws,
                         uint64_t seed);

}  // namespace sfst

#endif  // SFST_CTC_H_
