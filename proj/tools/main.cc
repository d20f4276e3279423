// sfst/main.cc
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
// Command line driver. Subcommands:
//   push        push weights toward the start state
//   conflate    replace epsilon cycles with acyclic gadgets
//   normalize   conflate then push; output is locally normalized
//   total       print the grand total (sum of all successful path weights)
//   sample      draw seeded random string pairs from a normalized FST
//   ctc-decode  sampling-based decoding of a CTC posterior
//   ctc-eval    exact probability of one labeling under a CTC posterior
//
// Exit codes: 0 on success, 1 on usage error, 2 on domain error.

#include <atomic>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfst/algebra.h"
#include "sfst/ctc.h"
#include "sfst/error.h"
#include "sfst/fst.h"
#include "sfst/fst_io.h"
#include "sfst/sampling.h"

namespace {

sfst::Wfst ReadFstArg(const std::string& path) {
  if (path.empty()) return sfst::ReadFstText(std::cin);
  std::ifstream in(path);
  if (!in) throw sfst::SfstError("cannot open input file: " + path);
  return sfst::ReadFstText(in);
}

sfst::CtcPosterior ReadPosteriorArg(const std::string& path) {
  if (path.empty()) return sfst::ReadCtcPosterior(std::cin);
  std::ifstream in(path);
  if (!in) throw sfst::SfstError("cannot open input file: " + path);
  return sfst::ReadCtcPosterior(in);
}

void WriteOutput(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw sfst::SfstError("cannot open output file: " + path);
  out << text;
}

std::string LabelsToNames(const std::vector<sfst::Label>& labels,
                          const sfst::SymbolTable* symbols) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += ' ';
    out += symbols ? symbols->NameOf(labels[i]) : std::to_string(labels[i]);
  }
  return out;
}

sfst::DecodeStrategy ParseStrategy(const std::string& name) {
  if (name == "never") return sfst::DecodeStrategy::kNever;
  if (name == "always") return sfst::DecodeStrategy::kAlways;
  if (name == "second") return sfst::DecodeStrategy::kSecondOccurrence;
  if (name == "beta") return sfst::DecodeStrategy::kBetaTest;
  throw sfst::SfstError("unknown strategy: " + name);
}

std::vector<std::string> SplitNames(const std::string& text) {
  std::vector<std::string> names;
  std::istringstream in(text);
  std::string name;
  while (in >> name) names.push_back(name);
  return names;
}

nlohmann::json DecodeResultJson(const sfst::DecodeResult& result,
                                const sfst::CtcPosterior& posterior) {
  nlohmann::json names = nlohmann::json::array();
  for (sfst::Label id : result.labeling) {
    names.push_back(posterior.labels[id - 1]);
  }
  nlohmann::json j;
  j["labeling"] = std::move(names);
  if (result.probability.has_value()) j["probability"] = *result.probability;
  j["draws_used"] = result.draws_used;
  j["probs_computed"] = result.probs_computed;
  j["seen_mass"] = result.seen_mass;
  j["stop_reason"] = sfst::StopReasonName(result.stop_reason);
  return j;
}

std::string DecodeResultText(const sfst::DecodeResult& result,
                             const sfst::CtcPosterior& posterior) {
  std::string out;
  out += "labeling:";
  for (sfst::Label id : result.labeling) {
    out += ' ';
    out += posterior.labels[id - 1];
  }
  out += '\n';
  if (result.probability.has_value()) {
    out += "probability: " + sfst::FormatWeight(*result.probability) + '\n';
  }
  out += "draws_used: " + std::to_string(result.draws_used) + '\n';
  out += "probs_computed: " + std::to_string(result.probs_computed) + '\n';
  out += "seen_mass: " + sfst::FormatWeight(result.seen_mass) + '\n';
  out += std::string("stop_reason: ") + sfst::StopReasonName(result.stop_reason) +
         '\n';
  return out;
}

std::string DecodeOneFile(const std::string& path,
                          const sfst::DecodeConfig& config, bool as_json) {
  sfst::CtcPosterior posterior = ReadPosteriorArg(path);
  sfst::Wfst lattice = sfst::BuildLattice(posterior);
  sfst::Wfst labeling_fst =
      sfst::BuildLabelingFst(posterior.labels, posterior.blank);
  sfst::DecodeResult result =
      sfst::CtcDecode(lattice, labeling_fst, posterior.BlankLabel(), config);
  if (as_json) return DecodeResultJson(result, posterior).dump() + "\n";
  return DecodeResultText(result, posterior);
}

int RunPush(const std::string& in, const std::string& out) {
  // Pushing requires a trim input; trimming first never changes behavior.
  sfst::Wfst fst = sfst::Connect(ReadFstArg(in));
  WriteOutput(out, sfst::WriteFstTextToString(sfst::WeightPush(fst)));
  return 0;
}

int RunConflate(const std::string& in, const std::string& out) {
  WriteOutput(out,
              sfst::WriteFstTextToString(sfst::ConflateEpsilonCycles(ReadFstArg(in))));
  return 0;
}

int RunNormalize(const std::string& in, const std::string& out) {
  WriteOutput(out, sfst::WriteFstTextToString(sfst::Normalize(ReadFstArg(in))));
  return 0;
}

int RunTotal(const std::string& in, const std::string& out, bool as_json) {
  sfst::Weight total = sfst::GrandTotal(ReadFstArg(in));
  if (as_json) {
    nlohmann::json j;
    j["total"] = total;
    WriteOutput(out, j.dump() + "\n");
  } else {
    WriteOutput(out, sfst::FormatWeight(total) + "\n");
  }
  return 0;
}

int RunSample(const std::string& in, const std::string& out, long long n,
              uint64_t seed) {
  if (n < 0) throw sfst::SfstError("--n must be nonnegative");
  sfst::Wfst fst = ReadFstArg(in);
  sfst::PathSampler sampler(fst);
  sfst::Rng rng(seed);
  const sfst::SymbolTable* symbols = fst.Symbols().get();
  std::string text;
  for (long long i = 0; i < n; ++i) {
    sfst::StringPair pair = sampler.SampleStringPair(rng);
    text += LabelsToNames(pair.input, symbols);
    text += '\t';
    text += LabelsToNames(pair.output, symbols);
    text += '\n';
  }
  WriteOutput(out, text);
  return 0;
}

int RunCtcDecode(const std::vector<std::string>& inputs, const std::string& out,
                 const sfst::DecodeConfig& config, bool as_json, int jobs) {
  if (inputs.size() <= 1 || jobs <= 1) {
    std::string text;
    if (inputs.empty()) {
      text = DecodeOneFile("", config, as_json);
    } else {
      for (const std::string& path : inputs) {
        text += DecodeOneFile(path, config, as_json);
      }
    }
    WriteOutput(out, text);
    return 0;
  }

  // Results are buffered per input and emitted in input order, so the output
  // bytes do not depend on the worker count.
  std::vector<std::string> results(inputs.size());
  std::vector<std::string> failures(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= inputs.size()) return;
      try {
        results[i] = DecodeOneFile(inputs[i], config, as_json);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::size_t thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), inputs.size());
  std::vector<std::thread> threads;
  threads.reserve(thread_count);
  for (std::size_t i = 0; i < thread_count; ++i) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!failures[i].empty()) {
      throw sfst::SfstError(inputs[i] + ": " + failures[i]);
    }
  }
  std::string text;
  for (const std::string& r : results) text += r;
  WriteOutput(out, text);
  return 0;
}

int RunCtcEval(const std::string& in, const std::string& out,
               const std::string& labeling_text, bool as_json) {
  sfst::CtcPosterior posterior = ReadPosteriorArg(in);
  std::vector<std::string> names = SplitNames(labeling_text);
  sfst::Labeling ell;
  ell.reserve(names.size());
  for (const std::string& name : names) {
    int column = -1;
    for (int j = 0; j < posterior.NumSymbols(); ++j) {
      if (posterior.labels[j] == name) {
        column = j;
        break;
      }
    }
    if (column < 0) {
      throw sfst::InvalidLabelError("labeling symbol not in posterior: " + name);
    }
    if (column == posterior.blank) {
      throw sfst::InvalidLabelError("labeling must not contain the blank: " +
                                    name);
    }
    ell.push_back(posterior.LabelId(column));
  }
  sfst::Wfst lattice = sfst::BuildLattice(posterior);
  sfst::Wfst labeling_fst =
      sfst::BuildLabelingFst(posterior.labels, posterior.blank);
  sfst::Weight p = sfst::LabelingProbability(lattice, labeling_fst, ell);
  if (as_json) {
    nlohmann::json j;
    j["labeling"] = names;
    j["probability"] = p;
    WriteOutput(out, j.dump() + "\n");
  } else {
    WriteOutput(out, sfst::FormatWeight(p) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic weighted finite-state transducer toolkit"};
  app.require_subcommand(1);

  std::string in_path;
  std::vector<std::string> in_paths;
  std::string out_path;
  long long n = 1;
  uint64_t seed = 0;
  long long max_draws = 0;
  double theta = 0.0;
  std::string strategy = "second";
  std::string labeling_text;
  std::string total_format = "text";
  std::string decode_format = "json";
  std::string eval_format = "text";
  int jobs = 1;

  auto add_in = [&](CLI::App* cmd) {
    cmd->add_option("--in", in_path, "Input file (default: stdin)");
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "Output file (default: stdout)");
  };
  auto add_format = [&](CLI::App* cmd, std::string& format) {
    cmd->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));
  };

  CLI::App* push =
      app.add_subcommand("push", "Push weights toward the start state");
  add_in(push);
  add_out(push);

  CLI::App* conflate = app.add_subcommand(
      "conflate", "Replace epsilon cycles with acyclic closure gadgets");
  add_in(conflate);
  add_out(conflate);

  CLI::App* normalize = app.add_subcommand(
      "normalize", "Conflate epsilon cycles, then push weights");
  add_in(normalize);
  add_out(normalize);

  CLI::App* total =
      app.add_subcommand("total", "Print the sum of all successful path weights");
  add_in(total);
  add_out(total);
  add_format(total, total_format);

  CLI::App* sample = app.add_subcommand(
      "sample", "Draw seeded random string pairs from a normalized FST");
  add_in(sample);
  add_out(sample);
  sample->add_option("--n", n, "Number of samples");
  sample->add_option("--seed", seed, "Random seed");

  CLI::App* ctc_decode = app.add_subcommand(
      "ctc-decode", "Decode CTC posteriors by sampling with exact evaluation");
  ctc_decode->add_option("--in", in_paths,
                         "Posterior file; repeatable (default: stdin)");
  add_out(ctc_decode);
  ctc_decode->add_option("--seed", seed, "Random seed");
  ctc_decode->add_option("--max-draws", max_draws, "Sampling budget");
  ctc_decode->add_option("--theta", theta,
                         "Unseen-mode probability threshold for early stopping");
  ctc_decode
      ->add_option("--strategy", strategy,
                   "When to evaluate exact probabilities")
      ->check(CLI::IsMember({"never", "always", "second", "beta"}));
  ctc_decode->add_option("--jobs", jobs, "Worker threads across input files")
      ->check(CLI::PositiveNumber);
  add_format(ctc_decode, decode_format);

  CLI::App* ctc_eval = app.add_subcommand(
      "ctc-eval", "Exact probability of a labeling under a CTC posterior");
  add_in(ctc_eval);
  add_out(ctc_eval);
  ctc_eval
      ->add_option("--labeling", labeling_text,
                   "Space-separated labeling symbols, e.g. \"a b b\"")
      ->required();
  add_format(ctc_eval, eval_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*push) return RunPush(in_path, out_path);
    if (*conflate) return RunConflate(in_path, out_path);
    if (*normalize) return RunNormalize(in_path, out_path);
    if (*total) return RunTotal(in_path, out_path, total_format == "json");
    if (*sample) return RunSample(in_path, out_path, n, seed);
    if (*ctc_decode) {
      sfst::DecodeConfig config;
      config.max_draws = max_draws;
      config.theta = theta;
      config.strategy = ParseStrategy(strategy);
      config.seed = seed;
      return RunCtcDecode(in_paths, out_path, config, decode_format == "json", jobs);
    }
    if (*ctc_eval) {
      return RunCtcEval(in_path, out_path, labeling_text, eval_format == "json");
    }
  } catch (const sfst::SfstError& e) {
    std::cerr << "sfst: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sfst: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
