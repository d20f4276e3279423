// sfst/fst.h
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
// The weighted finite-state transducer data model: states, labeled weighted
// arcs, a start state and final weights, plus structural utilities (strongly
// connected components, arc filters, trimming, path accessors).

#ifndef SFST_FST_H_
#define SFST_FST_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sfst/error.h"
#include "sfst/semiring.h"

namespace sfst {

// Symbol identifier. Id 0 is reserved for epsilon; alphabet symbols have
// id >= 1.
using Label = int;
inline constexpr Label kEpsilon = 0;

inline constexpr int kNoStateId = -1;

struct Arc {
  Label ilabel = kEpsilon;
  Label olabel = kEpsilon;
  Weight weight = SemiringOne();
  int target = kNoStateId;

  friend bool operator==(const Arc&, const Arc&) = default;
};

// Optional mapping between printable symbol names and label ids.
class SymbolTable {
 public:
  void AddSymbol(const std::string& name, Label id);
  std::optional<Label> Find(const std::string& name) const;
  std::optional<std::string> Find(Label id) const;
  // Name for an id, falling back to the decimal id when unmapped.
  std::string NameOf(Label id) const;
  const std::map<Label, std::string>& IdToName() const { return by_id_; }
  bool empty() const { return by_id_.empty(); }

 private:
  std::map<Label, std::string> by_id_;
  std::map<std::string, Label> by_name_;
};

// A mutable weighted transducer. States are dense integers; arcs live in
// per-state adjacency lists that preserve insertion order. A final weight of
// zero means "not final". A Wfst is single-writer; a const Wfst may be read
// from any number of threads.
class Wfst {
 public:
  explicit Wfst(SemiringKind semiring = SemiringKind::kProbability)
      : semiring_(semiring) {}

  // Returns the id of the freshly added state.
  int AddState();
  // Appends an arc to `state`'s adjacency list. Both `state` and the arc
  // target must be valid ids.
  void AddArc(int state, const Arc& arc);
  // Removes exactly the arc at `arc_index` within `state`'s list.
  void DeleteArc(int state, int arc_index);
  // Overwrites the arc at `arc_index` within `state`'s list in place.
  void SetArc(int state, int arc_index, const Arc& arc);
  void SetStart(int state);
  void SetFinal(int state, Weight weight);

  int NumStates() const { return static_cast<int>(arcs_.size()); }
  int NumArcs() const;
  int Start() const { return start_; }
  bool HasStart() const { return start_ != kNoStateId; }
  Weight Final(int state) const;
  const std::vector<Arc>& Arcs(int state) const;

  SemiringKind Semiring() const { return semiring_; }

  std::shared_ptr<const SymbolTable> Symbols() const { return symbols_; }
  void SetSymbols(std::shared_ptr<const SymbolTable> symbols) {
    symbols_ = std::move(symbols);
  }

  bool ValidState(int state) const {
    return state >= 0 && state < NumStates();
  }
  // Throws InvalidStateError unless `state` is in range.
  void CheckState(int state) const;

 private:
  std::vector<std::vector<Arc>> arcs_;
  std::vector<Weight> final_;
  int start_ = kNoStateId;
  SemiringKind semiring_;
  std::shared_ptr<const SymbolTable> symbols_;
};

// A sequence of consecutive arcs starting at `start`; arcs[i] departs from
// the target of arcs[i-1].
struct Path {
  int start = kNoStateId;
  std::vector<Arc> arcs;

  int Target() const { return arcs.empty() ? start : arcs.back().target; }
};

// Epsilon-stripped label sequences of a path.
std::vector<Label> PathInputLabels(const Path& path);
std::vector<Label> PathOutputLabels(const Path& path);

// Product of the path's arc weights times the final weight of its last
// state. A path ending at a non-final state has weight zero.
Weight PathWeight(const Wfst& fst, const Path& path);

// True iff every arc of `path` is present verbatim in the adjacency list of
// the state the path visits at that position.
bool IsValidPath(const Wfst& fst, const Path& path);

// Predicate selecting a subset of arcs; receives the source state and arc.
using ArcFilter = std::function<bool(int, const Arc&)>;

inline bool AllArcs(int, const Arc&) { return true; }
inline bool EpsilonArcsOnly(int, const Arc& arc) {
  return arc.ilabel == kEpsilon && arc.olabel == kEpsilon;
}

// True iff the arc is an epsilon transition whose endpoints both lie in
// `component` of the given state-to-component map. States outside the map's
// range never match.
ArcFilter EpsilonSccArcFilter(std::vector<int> scc, int component);

// Strongly connected components of the subgraph of arcs accepted by
// `filter`, via Tarjan's single-pass algorithm. Returns a dense map from
// state id to component id; states with no filtered cycle through them form
// singleton components.
std::vector<int> Scc(const Wfst& fst, const ArcFilter& filter = AllArcs);

// True iff the epsilon subgraph has no cycle (no epsilon component of size
// two or more and no epsilon self-loop).
bool IsEpsilonAcyclic(const Wfst& fst);

// Trims the automaton to states that are both accessible from the start and
// coaccessible to a final state, renumbering survivors in ascending order.
// The behavior is unchanged; an automaton with empty behavior becomes the
// empty automaton.
Wfst Connect(const Wfst& fst);

}  // namespace sfst

#endif  // SFST_FST_H_
