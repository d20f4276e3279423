// sfst/fst.cc
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

#include "sfst/fst.h"

#include <algorithm>
#include <deque>
#include <utility>

namespace sfst {

void SymbolTable::AddSymbol(const std::string& name, Label id) {
  by_id_[id] = name;
  by_name_[name] = id;
}

std::optional<Label> SymbolTable::Find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> SymbolTable::Find(Label id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::string SymbolTable::NameOf(Label id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? std::to_string(id) : it->second;
}

void Wfst::CheckState(int state) const {
  if (!ValidState(state)) {
    throw InvalidStateError("state id " + std::to_string(state) +
                            " out of range [0, " + std::to_string(NumStates()) +
                            ")");
  }
}

int Wfst::AddState() {
  arcs_.emplace_back();
  final_.push_back(SemiringZero());
  return NumStates() - 1;
}

void Wfst::AddArc(int state, const Arc& arc) {
  CheckState(state);
  CheckState(arc.target);
  arcs_[state].push_back(arc);
}

void Wfst::DeleteArc(int state, int arc_index) {
  CheckState(state);
  auto& list = arcs_[state];
  if (arc_index < 0 || arc_index >= static_cast<int>(list.size())) {
    throw InvalidStateError("arc index " + std::to_string(arc_index) +
                            " out of range for state " + std::to_string(state));
  }
  list.erase(list.begin() + arc_index);
}

void Wfst::SetArc(int state, int arc_index, const Arc& arc) {
  CheckState(state);
  CheckState(arc.target);
  auto& list = arcs_[state];
  if (arc_index < 0 || arc_index >= static_cast<int>(list.size())) {
    throw InvalidStateError("arc index " + std::to_string(arc_index) +
                            " out of range for state " + std::to_string(state));
  }
  list[arc_index] = arc;
}

void Wfst::SetStart(int state) {
  CheckState(state);
  start_ = state;
}

void Wfst::SetFinal(int state, Weight weight) {
  CheckState(state);
  final_[state] = weight;
}

Weight Wfst::Final(int state) const {
  CheckState(state);
  return final_[state];
}

const std::vector<Arc>& Wfst::Arcs(int state) const {
  CheckState(state);
  return arcs_[state];
}

int Wfst::NumArcs() const {
  int n = 0;
  for (const auto& list : arcs_) n += static_cast<int>(list.size());
  return n;
}

std::vector<Label> PathInputLabels(const Path& path) {
  std::vector<Label> labels;
  for (const Arc& arc : path.arcs) {
    if (arc.ilabel != kEpsilon) labels.push_back(arc.ilabel);
  }
  return labels;
}

std::vector<Label> PathOutputLabels(const Path& path) {
  std::vector<Label> labels;
  for (const Arc& arc : path.arcs) {
    if (arc.olabel != kEpsilon) labels.push_back(arc.olabel);
  }
  return labels;
}

Weight PathWeight(const Wfst& fst, const Path& path) {
  Weight w = SemiringOne();
  for (const Arc& arc : path.arcs) w = Times(w, arc.weight);
  return Times(w, fst.Final(path.Target()));
}

bool IsValidPath(const Wfst& fst, const Path& path) {
  if (!fst.ValidState(path.start)) return false;
  int state = path.start;
  for (const Arc& arc : path.arcs) {
    const auto& list = fst.Arcs(state);
    if (std::find(list.begin(), list.end(), arc) == list.end()) return false;
    state = arc.target;
  }
  return true;
}

ArcFilter EpsilonSccArcFilter(std::vector<int> scc, int component) {
  return [scc = std::move(scc), component](int source, const Arc& arc) {
    if (arc.ilabel != kEpsilon || arc.olabel != kEpsilon) return false;
    const int n = static_cast<int>(scc.size());
    if (source < 0 || source >= n || arc.target < 0 || arc.target >= n) {
      return false;
    }
    return scc[source] == component && scc[arc.target] == component;
  };
}

namespace {

// Explicit-stack frame for the iterative Tarjan traversal.
struct DfsFrame {
  int state;
  size_t next_arc;
};

}  // namespace

std::vector<int> Scc(const Wfst& fst, const ArcFilter& filter) {
  const int n = fst.NumStates();
  std::vector<int> component(n, -1);
  std::vector<int> index(n, -1);
  std::vector<int> lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> scc_stack;
  std::vector<DfsFrame> dfs;
  int next_index = 0;
  int next_component = 0;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    dfs.push_back({root, 0});
    index[root] = lowlink[root] = next_index++;
    scc_stack.push_back(root);
    on_stack[root] = true;

    while (!dfs.empty()) {
      auto& frame = dfs.back();
      const int s = frame.state;
      const auto& arcs = fst.Arcs(s);
      bool descended = false;
      while (frame.next_arc < arcs.size()) {
        const Arc& arc = arcs[frame.next_arc++];
        if (!filter(s, arc)) continue;
        const int t = arc.target;
        if (index[t] == -1) {
          index[t] = lowlink[t] = next_index++;
          scc_stack.push_back(t);
          on_stack[t] = true;
          dfs.push_back({t, 0});
          descended = true;
          break;
        }
        if (on_stack[t]) lowlink[s] = std::min(lowlink[s], index[t]);
      }
      if (descended) continue;
      if (lowlink[s] == index[s]) {
        int member;
        do {
          member = scc_stack.back();
          scc_stack.pop_back();
          on_stack[member] = false;
          component[member] = next_component;
        } while (member != s);
        ++next_component;
      }
      dfs.pop_back();
      if (!dfs.empty()) {
        lowlink[dfs.back().state] =
            std::min(lowlink[dfs.back().state], lowlink[s]);
      }
    }
  }
  return component;
}

bool IsEpsilonAcyclic(const Wfst& fst) {
  const std::vector<int> component = Scc(fst, EpsilonArcsOnly);
  std::vector<int> size(fst.NumStates(), 0);
  for (int c : component) ++size[c];
  for (int s = 0; s < fst.NumStates(); ++s) {
    if (size[component[s]] > 1) return false;
    for (const Arc& arc : fst.Arcs(s)) {
      if (EpsilonArcsOnly(s, arc) && arc.target == s) return false;
    }
  }
  return true;
}

Wfst Connect(const Wfst& fst) {
  Wfst empty(fst.Semiring());
  if (!fst.HasStart()) return empty;
  const int n = fst.NumStates();

  std::vector<bool> accessible(n, false);
  std::deque<int> queue{fst.Start()};
  accessible[fst.Start()] = true;
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (const Arc& arc : fst.Arcs(s)) {
      if (!accessible[arc.target]) {
        accessible[arc.target] = true;
        queue.push_back(arc.target);
      }
    }
  }

  std::vector<std::vector<int>> reverse(n);
  for (int s = 0; s < n; ++s) {
    for (const Arc& arc : fst.Arcs(s)) reverse[arc.target].push_back(s);
  }
  std::vector<bool> coaccessible(n, false);
  for (int s = 0; s < n; ++s) {
    if (fst.Final(s) > 0) {
      coaccessible[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (int p : reverse[s]) {
      if (!coaccessible[p]) {
        coaccessible[p] = true;
        queue.push_back(p);
      }
    }
  }

  std::vector<int> remap(n, kNoStateId);
  Wfst trimmed(fst.Semiring());
  trimmed.SetSymbols(fst.Symbols());
  for (int s = 0; s < n; ++s) {
    if (accessible[s] && coaccessible[s]) remap[s] = trimmed.AddState();
  }
  if (remap[fst.Start()] == kNoStateId) return empty;
  trimmed.SetStart(remap[fst.Start()]);
  for (int s = 0; s < n; ++s) {
    if (remap[s] == kNoStateId) continue;
    trimmed.SetFinal(remap[s], fst.Final(s));
    for (const Arc& arc : fst.Arcs(s)) {
      if (remap[arc.target] == kNoStateId) continue;
      Arc moved = arc;
      moved.target = remap[arc.target];
      trimmed.AddArc(remap[s], moved);
    }
  }
  return trimmed;
}

}  // namespace sfst
