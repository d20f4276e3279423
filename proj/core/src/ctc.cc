// sfst/ctc.cc
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

#include "sfst/ctc.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "json.hpp"
#include "sfst/algebra.h"
#include "sfst/error.h"
#include "sfst/sampling.h"
#include "sfst/semiring.h"

namespace sfst {

std::shared_ptr<const SymbolTable> CtcPosterior::MakeSymbols() const {
  auto symbols = std::make_shared<SymbolTable>();
  for (int j = 0; j < NumSymbols(); ++j) symbols->AddSymbol(labels[j], LabelId(j));
  return symbols;
}

void ValidateCtcPosterior(const CtcPosterior& posterior) {
  if (posterior.NumSteps() < 1) {
    throw InvalidPosteriorError("posterior needs at least one time step");
  }
  const int num_symbols = posterior.NumSymbols();
  if (num_symbols < 2) {
    throw InvalidPosteriorError("posterior needs at least two symbols");
  }
  if (posterior.blank < 0 || posterior.blank >= num_symbols) {
    throw InvalidPosteriorError("blank index " +
                                std::to_string(posterior.blank) +
                                " outside the symbol range");
  }
  std::set<std::string> seen;
  for (const std::string& name : posterior.labels) {
    if (name.empty() ||
        name.find_first_of(" \t\r\n") != std::string::npos) {
      throw InvalidPosteriorError("symbol name \"" + name +
                                  "\" is empty or contains whitespace");
    }
    if (!seen.insert(name).second) {
      throw InvalidPosteriorError("duplicate symbol name \"" + name + "\"");
    }
  }
  for (int i = 0; i < posterior.NumSteps(); ++i) {
    const auto& row = posterior.probs[i];
    if (static_cast<int>(row.size()) != num_symbols) {
      throw InvalidPosteriorError(
          "row " + std::to_string(i) + " has " + std::to_string(row.size()) +
          " entries, expected " + std::to_string(num_symbols));
    }
    double sum = 0.0;
    for (const double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidPosteriorError("probability " + std::to_string(p) +
                                    " in row " + std::to_string(i) +
                                    " outside [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw InvalidPosteriorError("row " + std::to_string(i) + " sums to " +
                                  std::to_string(sum) + ", expected 1");
    }
  }
}

namespace {

double ParseProbability(const std::string& field, int line_number) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("bad probability \"" + field + "\"", line_number);
  }
  return value;
}

CtcPosterior ReadCtcPosteriorText(std::istream& in) {
  CtcPosterior posterior;
  std::string line;
  int line_number = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream tokens(line);
    std::vector<std::string> fields;
    std::string field;
    while (tokens >> field) fields.push_back(std::move(field));
    if (fields.empty()) continue;
    if (!saw_header) {
      if (fields[0] != "labels:" || fields.size() < 3) {
        throw ParseError("expected `labels: <name> ... <blankname>`",
                         line_number);
      }
      posterior.labels.assign(fields.begin() + 1, fields.end());
      posterior.blank = static_cast<int>(posterior.labels.size()) - 1;
      saw_header = true;
      continue;
    }
    if (static_cast<int>(fields.size()) != posterior.NumSymbols()) {
      throw ParseError("expected " + std::to_string(posterior.NumSymbols()) +
                           " probabilities, got " +
                           std::to_string(fields.size()),
                       line_number);
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) {
      row.push_back(ParseProbability(f, line_number));
    }
    posterior.probs.push_back(std::move(row));
  }
  if (!saw_header) throw ParseError("missing `labels:` header", 1);
  return posterior;
}

CtcPosterior ReadCtcPosteriorJson(std::istream& in) {
  CtcPosterior posterior;
  try {
    const nlohmann::json doc = nlohmann::json::parse(in);
    posterior.labels = doc.at("labels").get<std::vector<std::string>>();
    posterior.blank = doc.at("blank").get<int>();
    posterior.probs =
        doc.at("probs").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("json posterior: ") + e.what(), 1);
  }
  return posterior;
}

}  // namespace

CtcPosterior ReadCtcPosterior(std::istream& in) {
  int c = in.peek();
  while (c != std::char_traits<char>::eof() &&
         std::isspace(static_cast<unsigned char>(c))) {
    in.get();
    c = in.peek();
  }
  CtcPosterior posterior = c == '{' ? ReadCtcPosteriorJson(in)
                                    : ReadCtcPosteriorText(in);
  ValidateCtcPosterior(posterior);
  return posterior;
}

CtcPosterior ReadCtcPosteriorFromString(const std::string& text) {
  std::istringstream in(text);
  return ReadCtcPosterior(in);
}

Labeling CollapseLabeling(const std::vector<Label>& symbols, Label blank) {
  Labeling collapsed;
  Label previous = kEpsilon;
  bool have_previous = false;
  for (const Label symbol : symbols) {
    if (have_previous && symbol == previous) continue;
    previous = symbol;
    have_previous = true;
    if (symbol != blank) collapsed.push_back(symbol);
  }
  return collapsed;
}

Wfst BuildLattice(const CtcPosterior& posterior) {
  ValidateCtcPosterior(posterior);
  Wfst lattice;
  lattice.SetSymbols(posterior.MakeSymbols());
  int previous = lattice.AddState();
  lattice.SetStart(previous);
  for (int i = 0; i < posterior.NumSteps(); ++i) {
    const int next = lattice.AddState();
    for (int j = 0; j < posterior.NumSymbols(); ++j) {
      const Label label = posterior.LabelId(j);
      lattice.AddArc(previous,
                     Arc{label, label, posterior.probs[i][j], next});
    }
    previous = next;
  }
  lattice.SetFinal(previous, SemiringOne());
  return lattice;
}

Wfst BuildLabelingFst(const std::vector<std::string>& labels, int blank) {
  const int num_symbols = static_cast<int>(labels.size());
  if (num_symbols < 2) {
    throw InvalidLabelError("labeling transducer needs at least two symbols");
  }
  if (blank < 0 || blank >= num_symbols) {
    throw InvalidLabelError("blank index " + std::to_string(blank) +
                            " outside the symbol range");
  }
  Wfst transducer;
  auto symbols = std::make_shared<SymbolTable>();
  for (int j = 0; j < num_symbols; ++j) symbols->AddSymbol(labels[j], j + 1);
  transducer.SetSymbols(std::move(symbols));

  const int start = transducer.AddState();
  transducer.SetStart(start);
  transducer.SetFinal(start, SemiringOne());
  std::vector<int> state_of(num_symbols, start);
  for (int j = 0; j < num_symbols; ++j) {
    if (j == blank) continue;
    state_of[j] = transducer.AddState();
    transducer.SetFinal(state_of[j], SemiringOne());
  }
  for (int q = 0; q < transducer.NumStates(); ++q) {
    for (int j = 0; j < num_symbols; ++j) {
      const Label label = j + 1;
      if (j == blank) {
        transducer.AddArc(q, Arc{label, kEpsilon, SemiringOne(), start});
      } else if (q == state_of[j]) {
        // A repeat within a run collapses away.
        transducer.AddArc(q, Arc{label, kEpsilon, SemiringOne(), q});
      } else {
        transducer.AddArc(q, Arc{label, label, SemiringOne(), state_of[j]});
      }
    }
  }
  return transducer;
}

Wfst PreimageFst(const Wfst& labeling_fst, const Labeling& ell) {
  return Compose(labeling_fst, Linear(ell));
}

Weight LabelingProbability(const Wfst& lattice, const Wfst& labeling_fst,
                           const Labeling& ell) {
  return GrandTotal(Compose(lattice, PreimageFst(labeling_fst, ell)));
}

double UnseenModeProb(double p_star, double t, int n) {
  const double unseen = std::pow(1.0 - p_star, n + 1) - std::pow(t, n + 1);
  return std::max(0.0, unseen);
}

namespace {

// I_x(a, b) at integer parameters: the Beta(a, b) CDF as the upper tail of
// a Binomial(a + b - 1, x).
double RegularizedIncompleteBeta(int a, int b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const int trials = a + b - 1;
  double sum = 0.0;
  for (int j = a; j <= trials; ++j) {
    const double log_term = std::lgamma(trials + 1.0) -
                            std::lgamma(j + 1.0) -
                            std::lgamma(trials - j + 1.0) +
                            j * std::log(x) + (trials - j) * std::log1p(-x);
    sum += std::exp(log_term);
  }
  return std::min(sum, 1.0);
}

}  // namespace

double OccurrenceExceedProb(int c, int n, double p_star, double t) {
  const double lo = std::clamp(p_star, 0.0, 1.0);
  const double hi = std::clamp(1.0 - t, 0.0, 1.0);
  if (lo >= hi) return 0.0;
  const int a = c + 1;
  const int b = n - c + 2;
  return std::max(0.0, RegularizedIncompleteBeta(a, b, hi) -
                           RegularizedIncompleteBeta(a, b, lo));
}

const char* StopReasonName(StopReason reason) {
  switch (reason) {
    case StopReason::kModeCertain:
      return "ModeCertain";
    case StopReason::kEarlyStopped:
      return "EarlyStopped";
    case StopReason::kDrawsExhausted:
      return "DrawsExhausted";
  }
  return "Unknown";
}

namespace {

bool StrategyFires(DecodeStrategy strategy, long long c, long long n,
                   double p_star, double t, double theta) {
  switch (strategy) {
    case DecodeStrategy::kNever:
      return false;
    case DecodeStrategy::kAlways:
      return true;
    case DecodeStrategy::kSecondOccurrence:
      return c > 1;
    case DecodeStrategy::kBetaTest:
      return OccurrenceExceedProb(static_cast<int>(c), static_cast<int>(n),
                                  p_star, t) >= theta;
  }
  return false;
}

Labeling MostFrequent(const std::map<Labeling, long long>& counts) {
  Labeling best;
  long long best_count = 0;
  for (const auto& [labeling, count] : counts) {
    if (count > best_count) {
      best = labeling;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

DecodeResult CtcDecode(const Wfst& lattice, const Wfst& labeling_fst,
                       Label blank, const DecodeConfig& config) {
  if (config.max_draws < 0) {
    throw SfstError("max_draws must be nonnegative");
  }
  if (!(config.theta >= 0.0 && config.theta < 1.0)) {
    throw SfstError("theta must lie in [0, 1)");
  }
  const bool never = config.strategy == DecodeStrategy::kNever;

  DecodeResult result;
  const Path best_path = ShortestPath(lattice);
  Labeling ell_star = CollapseLabeling(PathInputLabels(best_path), blank);
  double p_star = 0.0;
  double t = 0.0;
  std::map<Labeling, long long> counts;
  std::set<Labeling> evaluated;

  if (!never) {
    p_star = LabelingProbability(lattice, labeling_fst, ell_star);
    ++result.probs_computed;
    if (p_star > 0.5) {
      result.labeling = std::move(ell_star);
      result.probability = p_star;
      result.seen_mass = p_star;
      result.stop_reason = StopReason::kModeCertain;
      return result;
    }
    counts[ell_star] = 1;
    evaluated.insert(ell_star);
    t = p_star;
  }

  PathSampler sampler(lattice);
  Rng rng(config.seed);
  StopReason reason = StopReason::kDrawsExhausted;
  long long n = 0;
  while (n < config.max_draws) {
    const Path sample = sampler.SamplePath(rng);
    ++n;
    Labeling ell = CollapseLabeling(PathInputLabels(sample), blank);
    const long long c = ++counts[ell];
    if (!never && evaluated.count(ell) == 0 &&
        StrategyFires(config.strategy, c, n, p_star, t, config.theta)) {
      const double p = LabelingProbability(lattice, labeling_fst, ell);
      ++result.probs_computed;
      evaluated.insert(ell);
      t += p;
      if (t > 1.0 && t - 1.0 <= 1e-12) t = 1.0;
      if (p > p_star || (p == p_star && ell < ell_star)) {
        p_star = p;
        ell_star = std::move(ell);
      }
      if (p_star > 1.0 - t) {
        reason = StopReason::kModeCertain;
        break;
      }
    }
    if (UnseenModeProb(p_star, t, static_cast<int>(n)) < config.theta) {
      reason = StopReason::kEarlyStopped;
      break;
    }
  }

  result.draws_used = n;
  result.seen_mass = t;
  result.stop_reason = reason;
  if (never) {
    result.labeling =
        counts.empty() ? std::move(ell_star) : MostFrequent(counts);
  } else {
    result.labeling = std::move(ell_star);
    result.probability = p_star;
  }
  return result;
}

DecodeResult NaiveDecode(const Wfst& lattice, Label blank, long long draws,
                         uint64_t seed) {
  if (draws < 1) {
    throw EmptySampleError("naive decoding needs at least one draw");
  }
  PathSampler sampler(lattice);
  Rng rng(seed);
  std::map<Labeling, long long> counts;
  for (long long i = 0; i < draws; ++i) {
    const Path sample = sampler.SamplePath(rng);
    ++counts[CollapseLabeling(PathInputLabels(sample), blank)];
  }
  DecodeResult result;
  result.labeling = MostFrequent(counts);
  result.draws_used = draws;
  result.stop_reason = StopReason::kDrawsExhausted;
  return result;
}

}  // namespace sfst
