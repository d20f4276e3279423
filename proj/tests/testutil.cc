// sfst/testutil.cc
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

#include "testutil.h"

#include <sys/wait.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace sfst {
namespace testing {
namespace {

int UniformInt(Rng& rng, int bound) {
  int value = static_cast<int>(rng.Uniform() * bound);
  return value < bound ? value : bound - 1;
}

// Strings are packed into 64-bit codes with a leading sentinel digit in
// base 32; good for labels up to 31 and lengths up to 11.
uint64_t AppendCode(uint64_t code, Label label) {
  return code * 32 + static_cast<uint64_t>(label);
}

LabelString DecodeString(uint64_t code) {
  LabelString out;
  while (code > 1) {
    out.push_back(static_cast<Label>(code % 32));
    code /= 32;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

int CodeLength(uint64_t code) {
  int length = 0;
  while (code > 1) {
    ++length;
    code /= 32;
  }
  return length;
}

struct CellHash {
  std::size_t operator()(const std::pair<uint64_t, uint64_t>& cell) const {
    return std::hash<uint64_t>()(cell.first * 1000003u ^ cell.second);
  }
};

using Layer = std::unordered_map<std::pair<uint64_t, uint64_t>, double, CellHash>;

void CheckPackable(const Wfst& fst, int max_len) {
  if (max_len > 11) throw std::invalid_argument("max_len too large to pack");
  for (int q = 0; q < fst.NumStates(); ++q) {
    for (const Arc& arc : fst.Arcs(q)) {
      if (arc.ilabel > 31 || arc.olabel > 31) {
        throw std::invalid_argument("label too large to pack");
      }
    }
  }
}

}  // namespace

BehaviorTable TruncatedBehavior(const Wfst& fst, int max_len, double tail_tol,
                                int max_layers) {
  BehaviorTable table;
  if (!fst.HasStart()) return table;
  CheckPackable(fst, max_len);

  // Cell key: (state folded with input code, output code).
  auto pack = [](int state, uint64_t u, uint64_t v) {
    return std::pair<uint64_t, uint64_t>(
        u * 1024 + static_cast<uint64_t>(state), v);
  };
  auto unpack_state = [](const std::pair<uint64_t, uint64_t>& cell) {
    return static_cast<int>(cell.first % 1024);
  };
  auto unpack_u = [](const std::pair<uint64_t, uint64_t>& cell) {
    return cell.first / 1024;
  };

  Layer layer;
  layer[pack(fst.Start(), 1, 1)] = 1.0;
  auto absorb = [&](const Layer& cells) {
    for (const auto& [cell, mass] : cells) {
      double f = fst.Final(unpack_state(cell));
      if (f > 0) {
        table[{DecodeString(unpack_u(cell)), DecodeString(cell.second)}] +=
            mass * f;
      }
    }
  };
  absorb(layer);

  for (int pass = 0; pass < max_layers && !layer.empty(); ++pass) {
    Layer next;
    double live = 0.0;
    for (const auto& [cell, mass] : layer) {
      int q = unpack_state(cell);
      uint64_t u = unpack_u(cell);
      uint64_t v = cell.second;
      for (const Arc& arc : fst.Arcs(q)) {
        uint64_t nu = arc.ilabel == kEpsilon ? u : AppendCode(u, arc.ilabel);
        uint64_t nv = arc.olabel == kEpsilon ? v : AppendCode(v, arc.olabel);
        if (CodeLength(nu) > max_len || CodeLength(nv) > max_len) continue;
        double m = mass * arc.weight;
        next[pack(arc.target, nu, nv)] += m;
        live += m;
      }
    }
    layer = std::move(next);
    absorb(layer);
    if (live < tail_tol) break;
  }
  return table;
}

double TruncatedGrandTotal(const Wfst& fst, double tail_tol, int max_layers) {
  if (!fst.HasStart()) return 0.0;
  int n = fst.NumStates();
  std::vector<double> mass(n, 0.0);
  mass[fst.Start()] = 1.0;
  double total = 0.0;
  for (int pass = 0; pass < max_layers; ++pass) {
    double live = 0.0;
    std::vector<double> next(n, 0.0);
    for (int q = 0; q < n; ++q) {
      if (mass[q] == 0.0) continue;
      total += mass[q] * fst.Final(q);
      for (const Arc& arc : fst.Arcs(q)) {
        next[arc.target] += mass[q] * arc.weight;
        live += mass[q] * arc.weight;
      }
    }
    mass = std::move(next);
    if (live < tail_tol) break;
  }
  for (int q = 0; q < n; ++q) total += mass[q] * fst.Final(q);
  return total;
}

std::vector<std::pair<Path, double>> EnumerateSuccessfulPaths(const Wfst& fst,
                                                              int max_arcs) {
  std::vector<std::pair<Path, double>> result;
  if (!fst.HasStart()) return result;
  Path path;
  path.start = fst.Start();
  std::function<void(int, double)> walk = [&](int state, double weight) {
    double f = fst.Final(state);
    if (f > 0) result.emplace_back(path, weight * f);
    if (static_cast<int>(path.arcs.size()) >= max_arcs) return;
    for (const Arc& arc : fst.Arcs(state)) {
      path.arcs.push_back(arc);
      walk(arc.target, weight * arc.weight);
      path.arcs.pop_back();
    }
  };
  walk(fst.Start(), 1.0);
  return result;
}

std::vector<int> OracleScc(const Wfst& fst, const ArcFilter& filter) {
  int n = fst.NumStates();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int q = 0; q < n; ++q) {
    reach[q][q] = true;
    for (const Arc& arc : fst.Arcs(q)) {
      if (filter(q, arc)) reach[q][arc.target] = true;
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (int j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  std::vector<int> component(n, -1);
  int next_id = 0;
  for (int i = 0; i < n; ++i) {
    if (component[i] >= 0) continue;
    component[i] = next_id;
    for (int j = i + 1; j < n; ++j) {
      if (reach[i][j] && reach[j][i]) component[j] = next_id;
    }
    ++next_id;
  }
  return component;
}

LabelString OracleCollapse(const LabelString& symbols, Label blank) {
  LabelString out;
  Label prev = -1;
  for (Label s : symbols) {
    if (s != prev) out.push_back(s);
    prev = s;
  }
  std::erase(out, blank);
  return out;
}

std::map<LabelString, double> OracleLabelingDistribution(
    const CtcPosterior& posterior) {
  std::map<LabelString, double> dist;
  int t_steps = posterior.NumSteps();
  int l_syms = posterior.NumSymbols();
  std::vector<int> choice(t_steps, 0);
  for (;;) {
    double weight = 1.0;
    LabelString symbols(t_steps);
    for (int i = 0; i < t_steps; ++i) {
      weight *= posterior.probs[i][choice[i]];
      symbols[i] = posterior.LabelId(choice[i]);
    }
    dist[OracleCollapse(symbols, posterior.BlankLabel())] += weight;
    int pos = t_steps - 1;
    while (pos >= 0 && choice[pos] == l_syms - 1) choice[pos--] = 0;
    if (pos < 0) break;
    ++choice[pos];
  }
  return dist;
}

LabelString OracleBestPathLabeling(const CtcPosterior& posterior) {
  LabelString symbols;
  for (int i = 0; i < posterior.NumSteps(); ++i) {
    int best = 0;
    for (int j = 1; j < posterior.NumSymbols(); ++j) {
      if (posterior.probs[i][j] > posterior.probs[i][best]) best = j;
    }
    symbols.push_back(posterior.LabelId(best));
  }
  return OracleCollapse(symbols, posterior.BlankLabel());
}

double ChiSquaredPValue(const std::vector<long long>& counts,
                        const std::vector<double>& probs, long long total,
                        double min_expected) {
  if (counts.size() != probs.size()) {
    throw std::invalid_argument("counts/probs size mismatch");
  }
  double pooled_expected = 0.0;
  long long pooled_count = 0;
  double stat = 0.0;
  int bins = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double expected = probs[i] * static_cast<double>(total);
    if (expected < min_expected) {
      pooled_expected += expected;
      pooled_count += counts[i];
      continue;
    }
    double d = static_cast<double>(counts[i]) - expected;
    stat += d * d / expected;
    ++bins;
  }
  if (pooled_expected > 0.0) {
    double d = static_cast<double>(pooled_count) - pooled_expected;
    stat += d * d / pooled_expected;
    ++bins;
  }
  if (bins < 2) return 1.0;
  boost::math::chi_squared dist(bins - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

namespace {

double SimpsonRule(const std::function<double(double)>& f, double lo,
                   double hi, double flo, double fmid, double fhi) {
  return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
}

double AdaptiveSimpson(const std::function<double(double)>& f, double lo,
                       double hi, double flo, double fmid, double fhi,
                       double whole, double tol, int depth) {
  double mid = 0.5 * (lo + hi);
  double lm = 0.5 * (lo + mid);
  double rm = 0.5 * (mid + hi);
  double flm = f(lm);
  double frm = f(rm);
  double left = SimpsonRule(f, lo, mid, flo, flm, fmid);
  double right = SimpsonRule(f, mid, hi, fmid, frm, fhi);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return AdaptiveSimpson(f, lo, mid, flo, flm, fmid, left, tol / 2, depth - 1) +
         AdaptiveSimpson(f, mid, hi, fmid, frm, fhi, right, tol / 2, depth - 1);
}

}  // namespace

double Integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol) {
  if (hi <= lo) return 0.0;
  double mid = 0.5 * (lo + hi);
  double flo = f(lo);
  double fmid = f(mid);
  double fhi = f(hi);
  double whole = SimpsonRule(f, lo, hi, flo, fmid, fhi);
  return AdaptiveSimpson(f, lo, hi, flo, fmid, fhi, whole, tol, 60);
}

double BetaDensity(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) return 0.0;
  double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  double log_kernel = 0.0;
  if (a != 1.0) {
    if (x == 0.0) return a > 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
    log_kernel += (a - 1.0) * std::log(x);
  }
  if (b != 1.0) {
    if (x == 1.0) return b > 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
    log_kernel += (b - 1.0) * std::log1p(-x);
  }
  return std::exp(log_norm + log_kernel);
}

Wfst RandomTrimSfst(Rng& rng, int max_states, int max_symbols,
                    double max_outflow) {
  for (;;) {
    int n = 2 + UniformInt(rng, max_states - 1);
    std::vector<std::vector<Arc>> arcs(n);
    std::vector<double> final_weight(n, 0.0);
    for (int q = 0; q < n; ++q) {
      int degree = 1 + UniformInt(rng, 3);
      for (int d = 0; d < degree; ++d) {
        Arc arc;
        arc.target = UniformInt(rng, n);
        arc.ilabel = UniformInt(rng, max_symbols + 1);
        arc.olabel = UniformInt(rng, max_symbols + 1);
        arc.weight = 0.2 + 0.8 * rng.Uniform();
        arcs[q].push_back(arc);
      }
      if (rng.Uniform() < 0.4) final_weight[q] = 0.2 + 0.8 * rng.Uniform();
    }
    final_weight[n - 1] = 0.2 + 0.8 * rng.Uniform();

    Wfst fst;
    for (int q = 0; q < n; ++q) fst.AddState();
    fst.SetStart(0);
    for (int q = 0; q < n; ++q) {
      double outflow = final_weight[q];
      for (const Arc& arc : arcs[q]) outflow += arc.weight;
      double target = (0.55 + rng.Uniform() * 0.35) * max_outflow / 0.9;
      double scale = target / outflow;
      fst.SetFinal(q, final_weight[q] * scale);
      for (Arc arc : arcs[q]) {
        arc.weight *= scale;
        fst.AddArc(q, arc);
      }
    }
    Wfst trim = Connect(fst);
    if (trim.NumStates() > 0) return trim;
  }
}

Wfst RandomAcyclicNormalized(Rng& rng, int max_states, int max_paths) {
  for (;;) {
    int n = 3 + UniformInt(rng, std::max(1, max_states - 2));
    Wfst fst;
    for (int q = 0; q < n; ++q) fst.AddState();
    fst.SetStart(0);
    for (int q = 0; q < n - 1; ++q) {
      int degree = 1 + UniformInt(rng, 2);
      bool is_final = q > 0 && rng.Uniform() < 0.3;
      std::vector<double> raw(degree + (is_final ? 1 : 0));
      double sum = 0.0;
      for (double& r : raw) {
        r = 0.3 + rng.Uniform();
        sum += r;
      }
      double arc_mass = 0.0;
      for (int d = 0; d < degree; ++d) {
        Arc arc;
        arc.target = q + 1 + UniformInt(rng, n - q - 1);
        arc.ilabel = 1 + UniformInt(rng, 2);
        arc.olabel = arc.ilabel;
        arc.weight = raw[d] / sum;
        arc_mass += arc.weight;
        fst.AddArc(q, arc);
      }
      if (is_final) fst.SetFinal(q, 1.0 - arc_mass);
    }
    fst.SetFinal(n - 1, 1.0);
    auto paths = EnumerateSuccessfulPaths(fst, n);
    if (paths.empty() || static_cast<int>(paths.size()) > max_paths) continue;
    if (!CheckLocallyNormalized(fst).empty()) continue;
    return Connect(fst);
  }
}

CtcPosterior RandomPosterior(Rng& rng, int max_steps, int max_symbols) {
  CtcPosterior posterior;
  int t_steps = 1 + UniformInt(rng, max_steps);
  int l_syms = 2 + UniformInt(rng, max_symbols - 1);
  for (int j = 0; j < l_syms - 1; ++j) {
    posterior.labels.push_back(std::string(1, static_cast<char>('a' + j)));
  }
  posterior.labels.push_back("-");
  posterior.blank = l_syms - 1;
  posterior.probs.assign(t_steps, std::vector<double>(l_syms, 0.0));
  for (int i = 0; i < t_steps; ++i) {
    double sum = 0.0;
    for (int j = 0; j < l_syms; ++j) {
      posterior.probs[i][j] = 0.05 + rng.Uniform();
      sum += posterior.probs[i][j];
    }
    double head = 0.0;
    for (int j = 0; j < l_syms - 1; ++j) {
      posterior.probs[i][j] /= sum;
      head += posterior.probs[i][j];
    }
    posterior.probs[i][l_syms - 1] = 1.0 - head;
  }
  ValidateCtcPosterior(posterior);
  return posterior;
}

CtcPosterior NearTiePosterior(double margin) {
  // With identical rows (x, 1-x) over two frames, p("") = (1-x)^2 and
  // p("a") = 1 - (1-x)^2; their difference is the requested margin.
  double q = std::sqrt((1.0 - margin) / 2.0);
  CtcPosterior posterior;
  posterior.labels = {"a", "-"};
  posterior.blank = 1;
  posterior.probs = {{1.0 - q, q}, {1.0 - q, q}};
  ValidateCtcPosterior(posterior);
  return posterior;
}

std::string CaptureCommand(const std::string& command, int* exit_code) {
  std::string output;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed: " + command);
  char buffer[4096];
  std::size_t got;
  while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    output.append(buffer, got);
  }
  int status = pclose(pipe);
  if (exit_code != nullptr) {
    *exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  return output;
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace testing
}  // namespace sfst
