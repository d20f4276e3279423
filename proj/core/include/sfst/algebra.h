// sfst/algebra.h
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
// Weighted-automata algorithms: algebraic shortest distance, grand total,
// behavior evaluation, weight pushing, epsilon-cycle conflation, composition,
// projection, max-probability shortest path, and linear chain construction.

#ifndef SFST_ALGEBRA_H_
#define SFST_ALGEBRA_H_

#include <map>
#include <vector>

#include "sfst/fst.h"

namespace sfst {

// Single-source algebraic distances over a filtered subgraph. A state absent
// from `values` is unreachable from the source through filtered arcs.
struct DistanceVector {
  int source = kNoStateId;
  std::map<int, Weight> values;
};

// Sums the weights of all filtered paths from `source` to each reachable
// state, the empty path included (so values[source] >= 1). Cyclic blocks are
// closed exactly by semiring Gaussian elimination with star(); acyclic parts
// accumulate in topological order. Throws DivergentClosureError when a
// filtered cycle has weight >= 1, InvalidStateError on a bad source.
DistanceVector ShortestDistance(const Wfst& fst, int source,
                                const ArcFilter& filter = AllArcs);

// Total mass of all successful paths: sum over states of distance(q) * f(q).
// Zero for an automaton with no start state. Throws DivergentClosureError
// when a cycle has weight >= 1.
Weight GrandTotal(const Wfst& fst);

// Mass of all successful paths with input u and output v, evaluated as
// GrandTotal(Linear(u) o fst o Linear(v)). Labels of u and v must be >= 1.
Weight BehaviorEval(const Wfst& fst, const std::vector<Label>& u,
                    const std::vector<Label>& v);

// Rescales weights so every state's outflow f(q) + sum of arc weights is 1,
// leaving the topology untouched and dividing the behavior by the input's
// grand total. The input must be trim. Throws DivergentTotalError when the
// total diverges, ZeroMassStateError when a state carries no mass to
// termination.
Wfst WeightPush(const Wfst& fst);

// Size accounting for ConflateEpsilonCycles, taken before the final trim.
struct ConflationStats {
  int num_split_states = 0;
  int num_closure_arcs = 0;
  int num_deleted_arcs = 0;
  int num_redirected_arcs = 0;
  int pre_trim_num_states = 0;
  int pre_trim_num_arcs = 0;
};

// Replaces every nontrivial epsilon strongly connected component (size two
// or more, or a single state with an epsilon self-loop) by a bipartite
// closure: each member q gains a split state s_q holding epsilon arcs
// s_q -> t weighted by the intra-component algebraic distance from q to t;
// intra-component epsilon arcs are deleted and arcs into the component are
// redirected to the split states. The epsilon subgraph of the result is
// acyclic and the behavior is preserved exactly. The result is trimmed.
// Throws DivergentClosureError when a component's cycle mass is >= 1.
Wfst ConflateEpsilonCycles(const Wfst& fst, ConflationStats* stats = nullptr);

// Conflation followed by weight pushing: the normalization pipeline.
Wfst Normalize(const Wfst& fst);

// Composition matching a's output tape against b's input tape. At most one
// of the matched tapes may carry epsilon labels; epsilon moves advance that
// side alone, which keeps composed paths in one-to-one correspondence with
// the matched path pairs. Throws EpsilonAmbiguityError when both matched
// tapes carry epsilons.
Wfst Compose(const Wfst& a, const Wfst& b);

enum class ProjectSide { kInput, kOutput };

// Copies the kept side's label over the other side of every arc.
Wfst Project(const Wfst& fst, ProjectSide side);

// A successful path of maximal weight under the max-times reading of the
// weights. Ties are broken by lexicographic comparison of input-label
// sequences, then by arc count, then by output labels and targets. Throws
// EmptyAutomatonError when no successful path exists, DivergentClosureError
// when a cycle with weight > 1 makes the maximum unbounded.
Path ShortestPath(const Wfst& fst);

enum class LinearSide { kAcceptor, kInput, kOutput };

// Chain automaton of |s|+1 states accepting exactly s with weight 1. The
// acceptor form carries s on both tapes; the input (output) form carries s
// on the input (output) tape and epsilon on the other. Labels must be >= 1;
// throws InvalidLabelError otherwise.
Wfst Linear(const std::vector<Label>& s, LinearSide side = LinearSide::kAcceptor);

}  // namespace sfst

#endif  // SFST_ALGEBRA_H_
