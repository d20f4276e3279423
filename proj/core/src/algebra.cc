// sfst/algebra.cc
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

#include "sfst/algebra.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sfst/error.h"
#include "sfst/semiring.h"

namespace sfst {

namespace {

using Matrix = std::vector<std::vector<Weight>>;

// All-pairs path closure I + M + M^2 + ... by Lehmann's algorithm. Pivoting
// uses star() for the self-mass at the pivot, so any cycle of mass >= 1
// raises DivergentClosureError. The diagonal of the result counts the empty
// path, so it is always >= 1.
Matrix ClosureMatrix(const Matrix& m) {
  const int n = static_cast<int>(m.size());
  Matrix cur = m;
  for (int k = 0; k < n; ++k) {
    const Weight loop = Star(cur[k][k]);
    Matrix next = cur;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        next[i][j] = cur[i][j] + cur[i][k] * loop * cur[k][j];
      }
    }
    cur = std::move(next);
  }
  for (int i = 0; i < n; ++i) cur[i][i] += SemiringOne();
  return cur;
}

// Members of each component, ascending within a component.
std::vector<std::vector<int>> GroupByComponent(const std::vector<int>& scc,
                                               int num_states) {
  int num_components = 0;
  for (int q = 0; q < num_states; ++q) {
    num_components = std::max(num_components, scc[q] + 1);
  }
  std::vector<std::vector<int>> grouped(num_components);
  for (int q = 0; q < num_states; ++q) grouped[scc[q]].push_back(q);
  return grouped;
}

bool HasFilteredSelfLoop(const Wfst& fst, int state, const ArcFilter& filter) {
  for (const Arc& arc : fst.Arcs(state)) {
    if (arc.target == state && filter(state, arc)) return true;
  }
  return false;
}

}  // namespace

DistanceVector ShortestDistance(const Wfst& fst, int source,
                                const ArcFilter& filter) {
  fst.CheckState(source);
  const int n = fst.NumStates();

  std::vector<char> reached(n, 0);
  reached[source] = 1;
  std::deque<int> queue = {source};
  while (!queue.empty()) {
    const int q = queue.front();
    queue.pop_front();
    for (const Arc& arc : fst.Arcs(q)) {
      if (!filter(q, arc) || reached[arc.target]) continue;
      reached[arc.target] = 1;
      queue.push_back(arc.target);
    }
  }

  const ArcFilter sub = [&](int q, const Arc& arc) {
    return reached[q] && reached[arc.target] && filter(q, arc);
  };
  const std::vector<int> scc = Scc(fst, sub);
  std::vector<std::vector<int>> grouped = GroupByComponent(scc, n);
  for (auto& members : grouped) {
    members.erase(std::remove_if(members.begin(), members.end(),
                                 [&](int q) { return !reached[q]; }),
                  members.end());
  }

  std::vector<Weight> d(n, SemiringZero());
  d[source] = SemiringOne();
  // Completion ids from Tarjan ascend from the sinks of the condensation, so
  // descending order is topological from the source side.
  std::vector<int> pos(n, -1);
  for (int component = static_cast<int>(grouped.size()) - 1; component >= 0;
       --component) {
    const std::vector<int>& members = grouped[component];
    if (members.empty()) continue;
    const bool cyclic = members.size() > 1 ||
                        HasFilteredSelfLoop(fst, members[0], sub);
    if (cyclic) {
      const int k = static_cast<int>(members.size());
      for (int i = 0; i < k; ++i) pos[members[i]] = i;
      Matrix m(k, std::vector<Weight>(k, SemiringZero()));
      for (int i = 0; i < k; ++i) {
        for (const Arc& arc : fst.Arcs(members[i])) {
          if (sub(members[i], arc) && scc[arc.target] == component) {
            m[i][pos[arc.target]] += arc.weight;
          }
        }
      }
      const Matrix closure = ClosureMatrix(m);
      std::vector<Weight> in(k);
      for (int i = 0; i < k; ++i) in[i] = d[members[i]];
      for (int j = 0; j < k; ++j) {
        Weight mass = SemiringZero();
        for (int i = 0; i < k; ++i) mass += in[i] * closure[i][j];
        d[members[j]] = mass;
      }
      for (int i = 0; i < k; ++i) pos[members[i]] = -1;
    }
    for (const int q : members) {
      for (const Arc& arc : fst.Arcs(q)) {
        if (sub(q, arc) && scc[arc.target] != component) {
          d[arc.target] += d[q] * arc.weight;
        }
      }
    }
  }

  DistanceVector result;
  result.source = source;
  for (int q = 0; q < n; ++q) {
    if (reached[q]) result.values[q] = d[q];
  }
  return result;
}

Weight GrandTotal(const Wfst& fst) {
  if (!fst.HasStart()) return SemiringZero();
  const DistanceVector d = ShortestDistance(fst, fst.Start());
  Weight total = SemiringZero();
  for (const auto& [q, mass] : d.values) total += mass * fst.Final(q);
  return total;
}

Weight BehaviorEval(const Wfst& fst, const std::vector<Label>& u,
                    const std::vector<Label>& v) {
  return GrandTotal(Compose(Compose(Linear(u), fst), Linear(v)));
}

namespace {

// beta(q) = f(q) + sum over arcs q->t of w * beta(t): the mass carried from q
// to termination. Solved per component in reverse topological order, with
// exact closure inside cyclic components.
std::vector<Weight> ReverseMass(const Wfst& fst) {
  const int n = fst.NumStates();
  const std::vector<int> scc = Scc(fst);
  const std::vector<std::vector<int>> grouped = GroupByComponent(scc, n);

  std::vector<Weight> beta(n, SemiringZero());
  std::vector<int> pos(n, -1);
  for (int component = 0; component < static_cast<int>(grouped.size());
       ++component) {
    const std::vector<int>& members = grouped[component];
    const int k = static_cast<int>(members.size());
    std::vector<Weight> base(k);
    for (int i = 0; i < k; ++i) {
      Weight mass = fst.Final(members[i]);
      for (const Arc& arc : fst.Arcs(members[i])) {
        if (scc[arc.target] != component) {
          mass += arc.weight * beta[arc.target];
        }
      }
      base[i] = mass;
    }
    const bool cyclic =
        k > 1 || HasFilteredSelfLoop(fst, members[0], AllArcs);
    if (cyclic) {
      for (int i = 0; i < k; ++i) pos[members[i]] = i;
      Matrix m(k, std::vector<Weight>(k, SemiringZero()));
      for (int i = 0; i < k; ++i) {
        for (const Arc& arc : fst.Arcs(members[i])) {
          if (scc[arc.target] == component) {
            m[i][pos[arc.target]] += arc.weight;
          }
        }
      }
      const Matrix closure = ClosureMatrix(m);
      for (int i = 0; i < k; ++i) {
        Weight mass = SemiringZero();
        for (int j = 0; j < k; ++j) mass += closure[i][j] * base[j];
        beta[members[i]] = mass;
      }
      for (int i = 0; i < k; ++i) pos[members[i]] = -1;
    } else {
      beta[members[0]] = base[0];
    }
  }
  return beta;
}

}  // namespace

Wfst WeightPush(const Wfst& fst) {
  if (!fst.HasStart()) {
    throw EmptyAutomatonError("cannot push an automaton with no start state");
  }
  std::vector<Weight> beta;
  try {
    beta = ReverseMass(fst);
  } catch (const DivergentClosureError& e) {
    throw DivergentTotalError(std::string("grand total diverges: ") + e.what());
  }
  for (int q = 0; q < fst.NumStates(); ++q) {
    if (!(beta[q] > 0)) {
      throw ZeroMassStateError("state " + std::to_string(q) +
                               " carries no mass to termination; trim first");
    }
  }
  Wfst result = fst;
  for (int q = 0; q < result.NumStates(); ++q) {
    const auto& arcs = result.Arcs(q);
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
      Arc arc = arcs[i];
      arc.weight = arc.weight * beta[arc.target] / beta[q];
      result.SetArc(q, i, arc);
    }
    result.SetFinal(q, fst.Final(q) / beta[q]);
  }
  return result;
}

Wfst ConflateEpsilonCycles(const Wfst& fst, ConflationStats* stats) {
  ConflationStats counts;
  const int n = fst.NumStates();
  const std::vector<int> scc = Scc(fst, EpsilonArcsOnly);
  const std::vector<std::vector<int>> grouped = GroupByComponent(scc, n);

  std::vector<char> nontrivial(grouped.size(), 0);
  std::vector<Matrix> closures(grouped.size());
  std::vector<int> pos(n, -1);
  for (int component = 0; component < static_cast<int>(grouped.size());
       ++component) {
    const std::vector<int>& members = grouped[component];
    if (members.size() == 1 &&
        !HasFilteredSelfLoop(fst, members[0], EpsilonArcsOnly)) {
      continue;
    }
    nontrivial[component] = 1;
    const int k = static_cast<int>(members.size());
    for (int i = 0; i < k; ++i) pos[members[i]] = i;
    Matrix m(k, std::vector<Weight>(k, SemiringZero()));
    for (int i = 0; i < k; ++i) {
      for (const Arc& arc : fst.Arcs(members[i])) {
        if (EpsilonArcsOnly(members[i], arc) &&
            scc[arc.target] == component) {
          m[i][pos[arc.target]] += arc.weight;
        }
      }
    }
    closures[component] = ClosureMatrix(m);
  }

  Wfst result = fst;
  // One split state per member, holding the member's row of the component's
  // all-pairs distance as epsilon arcs to every member.
  std::vector<int> split(n, kNoStateId);
  for (int q = 0; q < n; ++q) {
    const int component = scc[q];
    if (!nontrivial[component]) continue;
    const int s = result.AddState();
    split[q] = s;
    ++counts.num_split_states;
    const std::vector<int>& members = grouped[component];
    const Matrix& closure = closures[component];
    for (int j = 0; j < static_cast<int>(members.size()); ++j) {
      result.AddArc(s, Arc{kEpsilon, kEpsilon, closure[pos[q]][j], members[j]});
      ++counts.num_closure_arcs;
    }
  }

  // Intra-component epsilon arcs are deleted; every other arc into a split
  // member is redirected to the split state. Changes are collected first:
  // retargets keep indices stable, deletions run back to front.
  for (int q = 0; q < n; ++q) {
    const auto& arcs = result.Arcs(q);
    std::vector<int> deletions;
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
      const Arc arc = arcs[i];
      if (EpsilonArcsOnly(q, arc) && scc[arc.target] == scc[q] &&
          nontrivial[scc[q]]) {
        deletions.push_back(i);
      } else if (split[arc.target] != kNoStateId) {
        Arc redirected = arc;
        redirected.target = split[arc.target];
        result.SetArc(q, i, redirected);
        ++counts.num_redirected_arcs;
      }
    }
    for (auto it = deletions.rbegin(); it != deletions.rend(); ++it) {
      result.DeleteArc(q, *it);
      ++counts.num_deleted_arcs;
    }
  }

  if (result.HasStart() && split[result.Start()] != kNoStateId) {
    result.SetStart(split[result.Start()]);
  }

  counts.pre_trim_num_states = result.NumStates();
  counts.pre_trim_num_arcs = result.NumArcs();
  if (stats != nullptr) *stats = counts;
  return Connect(result);
}

Wfst Normalize(const Wfst& fst) { return WeightPush(ConflateEpsilonCycles(fst)); }

Wfst Compose(const Wfst& a, const Wfst& b) {
  bool a_output_epsilons = false;
  for (int q = 0; q < a.NumStates() && !a_output_epsilons; ++q) {
    for (const Arc& arc : a.Arcs(q)) {
      if (arc.olabel == kEpsilon) {
        a_output_epsilons = true;
        break;
      }
    }
  }
  bool b_input_epsilons = false;
  for (int q = 0; q < b.NumStates() && !b_input_epsilons; ++q) {
    for (const Arc& arc : b.Arcs(q)) {
      if (arc.ilabel == kEpsilon) {
        b_input_epsilons = true;
        break;
      }
    }
  }
  if (a_output_epsilons && b_input_epsilons) {
    throw EpsilonAmbiguityError(
        "both matched tapes carry epsilons; remove them from one side");
  }

  Wfst result(a.Semiring());
  result.SetSymbols(a.Symbols() != nullptr ? a.Symbols() : b.Symbols());
  if (!a.HasStart() || !b.HasStart()) return result;

  // Arcs of a b-state bucketed by input label, built on first visit.
  std::vector<std::optional<std::map<Label, std::vector<int>>>> b_index(
      b.NumStates());
  const auto b_arcs_with_ilabel = [&](int qb,
                                      Label label) -> const std::vector<int>* {
    auto& index = b_index[qb];
    if (!index.has_value()) {
      index.emplace();
      const auto& arcs = b.Arcs(qb);
      for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
        if (arcs[i].ilabel != kEpsilon) (*index)[arcs[i].ilabel].push_back(i);
      }
    }
    const auto it = index->find(label);
    return it == index->end() ? nullptr : &it->second;
  };

  std::map<std::pair<int, int>, int> pair_ids;
  std::deque<std::pair<int, int>> queue;
  const auto state_for = [&](int qa, int qb) {
    const auto [it, inserted] = pair_ids.emplace(std::make_pair(qa, qb), 0);
    if (inserted) {
      it->second = result.AddState();
      result.SetFinal(it->second, Times(a.Final(qa), b.Final(qb)));
      queue.emplace_back(qa, qb);
    }
    return it->second;
  };

  result.SetStart(state_for(a.Start(), b.Start()));
  while (!queue.empty()) {
    const auto [qa, qb] = queue.front();
    queue.pop_front();
    const int id = pair_ids.at({qa, qb});
    for (const Arc& arc : a.Arcs(qa)) {
      if (arc.olabel == kEpsilon) {
        result.AddArc(id, Arc{arc.ilabel, kEpsilon, arc.weight,
                              state_for(arc.target, qb)});
        continue;
      }
      const std::vector<int>* matches = b_arcs_with_ilabel(qb, arc.olabel);
      if (matches == nullptr) continue;
      for (const int i : *matches) {
        const Arc& barc = b.Arcs(qb)[i];
        result.AddArc(id, Arc{arc.ilabel, barc.olabel,
                              Times(arc.weight, barc.weight),
                              state_for(arc.target, barc.target)});
      }
    }
    for (const Arc& barc : b.Arcs(qb)) {
      if (barc.ilabel == kEpsilon) {
        result.AddArc(id, Arc{kEpsilon, barc.olabel, barc.weight,
                              state_for(qa, barc.target)});
      }
    }
  }
  return result;
}

Wfst Project(const Wfst& fst, ProjectSide side) {
  Wfst result = fst;
  for (int q = 0; q < result.NumStates(); ++q) {
    const auto& arcs = result.Arcs(q);
    for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
      Arc arc = arcs[i];
      if (side == ProjectSide::kInput) {
        arc.olabel = arc.ilabel;
      } else {
        arc.ilabel = arc.olabel;
      }
      result.SetArc(q, i, arc);
    }
  }
  return result;
}

namespace {

// Order on path suffixes: input labels, then arc count, then output labels,
// then targets. The empty suffix is minimal, and prepending a common arc
// preserves the order, so suffix minima compose state by state.
bool SuffixLess(const Wfst& fst, const std::vector<Arc>& x,
                const std::vector<Arc>& y) {
  const Path px{0, x};
  const Path py{0, y};
  const std::vector<Label> ix = PathInputLabels(px);
  const std::vector<Label> iy = PathInputLabels(py);
  if (ix != iy) return ix < iy;
  if (x.size() != y.size()) return x.size() < y.size();
  const std::vector<Label> ox = PathOutputLabels(px);
  const std::vector<Label> oy = PathOutputLabels(py);
  if (ox != oy) return ox < oy;
  std::vector<int> tx, ty;
  for (const Arc& arc : x) tx.push_back(arc.target);
  for (const Arc& arc : y) ty.push_back(arc.target);
  return tx < ty;
}

}  // namespace

Path ShortestPath(const Wfst& fst) {
  if (!fst.HasStart()) {
    throw EmptyAutomatonError("automaton has no start state");
  }
  const int n = fst.NumStates();

  // gamma(q): best mass from q to termination under max-times. Monotone
  // value iteration settles within n passes when no cycle reaches weight 1.
  std::vector<Weight> gamma(n);
  for (int q = 0; q < n; ++q) gamma[q] = fst.Final(q);
  for (int pass = 0;; ++pass) {
    bool changed = false;
    for (int q = 0; q < n; ++q) {
      for (const Arc& arc : fst.Arcs(q)) {
        const Weight candidate = arc.weight * gamma[arc.target];
        if (candidate > gamma[q]) {
          gamma[q] = candidate;
          changed = true;
        }
      }
    }
    if (!changed) break;
    if (pass > n) {
      throw DivergentClosureError(
          "a cycle of weight above one makes the best path unbounded");
    }
  }
  if (!(gamma[fst.Start()] > 0)) {
    throw EmptyAutomatonError("no successful path reaches a final state");
  }

  // Minimal tight suffix per state. An arc is tight when following it loses
  // nothing; a tight final stop is always minimal. Tight cycles (weight
  // exactly 1) would make the minimum ill-defined and are rejected.
  std::vector<std::optional<std::vector<Arc>>> best(n);
  std::vector<char> on_stack(n, 0);
  const std::function<const std::vector<Arc>&(int)> solve =
      [&](int q) -> const std::vector<Arc>& {
    if (best[q].has_value()) return *best[q];
    if (on_stack[q]) {
      throw DivergentClosureError(
          "a cycle of weight one ties the best path; conflate or push first");
    }
    on_stack[q] = 1;
    std::optional<std::vector<Arc>> choice;
    if (fst.Final(q) == gamma[q]) {
      choice.emplace();
    } else {
      for (const Arc& arc : fst.Arcs(q)) {
        if (arc.weight * gamma[arc.target] != gamma[q]) continue;
        std::vector<Arc> candidate;
        candidate.push_back(arc);
        const std::vector<Arc>& rest = solve(arc.target);
        candidate.insert(candidate.end(), rest.begin(), rest.end());
        if (!choice.has_value() || SuffixLess(fst, candidate, *choice)) {
          choice = std::move(candidate);
        }
      }
    }
    on_stack[q] = 0;
    if (!choice.has_value()) {
      throw SfstError("internal: no tight continuation at state " +
                      std::to_string(q));
    }
    best[q] = std::move(*choice);
    return *best[q];
  };

  Path path;
  path.start = fst.Start();
  path.arcs = solve(fst.Start());
  return path;
}

Wfst Linear(const std::vector<Label>& s, LinearSide side) {
  Wfst result;
  int prev = result.AddState();
  result.SetStart(prev);
  for (const Label label : s) {
    if (label <= kEpsilon) {
      throw InvalidLabelError("linear chain labels must be positive, got " +
                              std::to_string(label));
    }
    const int next = result.AddState();
    Arc arc{label, label, SemiringOne(), next};
    if (side == LinearSide::kInput) arc.olabel = kEpsilon;
    if (side == LinearSide::kOutput) arc.ilabel = kEpsilon;
    result.AddArc(prev, arc);
    prev = next;
  }
  result.SetFinal(prev, SemiringOne());
  return result;
}

}  // namespace sfst
