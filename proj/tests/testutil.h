// sfst/testutil.h
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
// Independent oracles and fixture generators for the test suites. The
// oracles deliberately avoid the library's algebraic machinery: behavior is
// recovered by mass-tracked breadth-first path expansion, components by
// transitive closure, integrals by adaptive quadrature.

#ifndef SFST_TESTUTIL_H_
#define SFST_TESTUTIL_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sfst/ctc.h"
#include "sfst/fst.h"
#include "sfst/sampling.h"

namespace sfst {
namespace testing {

using LabelString = std::vector<Label>;
using StringPairKey = std::pair<LabelString, LabelString>;
using BehaviorTable = std::map<StringPairKey, double>;

// Total mass per (input, output) pair with both strings capped at
// `max_len`, accumulated by expanding paths breadth-first one arc at a time
// until the live mass falls below `tail_tol` (or `max_layers` passes).
// Exact up to the abandoned tail, which is bounded by tail_tol when every
// state's outflow is below one.
BehaviorTable TruncatedBehavior(const Wfst& fst, int max_len,
                                double tail_tol = 1e-13,
                                int max_layers = 20000);

// Sum of successful path weights by the same layered expansion, with no
// string bookkeeping.
double TruncatedGrandTotal(const Wfst& fst, double tail_tol = 1e-13,
                           int max_layers = 20000);

// All successful paths with at most `max_arcs` arcs, by depth-first walk.
// Suitable for acyclic machines; the arc cap bounds the walk elsewhere.
std::vector<std::pair<Path, double>> EnumerateSuccessfulPaths(
    const Wfst& fst, int max_arcs);

// Component ids by O(n^3) transitive closure over the filtered arcs:
// states are grouped iff each reaches the other. Ids are dense from 0 in
// order of smallest member.
std::vector<int> OracleScc(const Wfst& fst, const ArcFilter& filter);

// Collapses runs, then strips blanks; the reference for CollapseLabeling
// and for grouping enumerated lattice paths by labeling.
LabelString OracleCollapse(const LabelString& symbols, Label blank);

// Exhaustive labeling distribution of a posterior: every one of the L^T
// frame sequences, weighted and grouped by collapsed labeling.
std::map<LabelString, double> OracleLabelingDistribution(
    const CtcPosterior& posterior);

// Frame sequence of maximal weight (unique argmax assumed), collapsed.
LabelString OracleBestPathLabeling(const CtcPosterior& posterior);

// Chi-squared goodness-of-fit p-value for observed counts against expected
// probabilities. Categories with expected count below `min_expected` are
// pooled into one bin.
double ChiSquaredPValue(const std::vector<long long>& counts,
                        const std::vector<double>& probs, long long total,
                        double min_expected = 10.0);

// Adaptive Simpson quadrature to within `tol`.
double Integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol);

// Beta(a, b) density at x, zero outside (0, 1).
double BetaDensity(double a, double b, double x);

// Random trim probability FST: up to `max_states` states, labels in
// [0, max_symbols] on each tape (0 is epsilon), every outflow scaled below
// `max_outflow` so all cycle masses stay below one and truncated expansions
// converge geometrically. Trim and nonempty by construction.
Wfst RandomTrimSfst(Rng& rng, int max_states, int max_symbols,
                    double max_outflow = 0.9);

// Random locally normalized acyclic FST with at most `max_paths` successful
// paths, for sampler distribution checks.
Wfst RandomAcyclicNormalized(Rng& rng, int max_states, int max_paths);

// Random CTC posterior with T in [1, max_steps], L in [2, max_symbols],
// rows strictly positive and summing to one; the last column is the blank.
CtcPosterior RandomPosterior(Rng& rng, int max_steps, int max_symbols);

// Two-frame single-letter posterior whose top two labelings differ in
// probability by exactly `margin` (positive: the letter wins; negative: the
// empty labeling wins).
CtcPosterior NearTiePosterior(double margin);

// Runs a shell command, captures stdout, and stores the exit code.
std::string CaptureCommand(const std::string& command, int* exit_code);

// Writes `text` to `path`, failing the caller on error.
void WriteFile(const std::string& path, const std::string& text);

}  // namespace testing
}  // namespace sfst

#endif  // SFST_TESTUTIL_H_
