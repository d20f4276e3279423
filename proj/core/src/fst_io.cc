// sfst/fst_io.cc
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

#include "sfst/fst_io.h"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sfst/error.h"

namespace sfst {

namespace {

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream tokens(line);
  std::string field;
  while (tokens >> field) fields.push_back(std::move(field));
  return fields;
}

int ParseStateId(const std::string& field, int line_number) {
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value < 0) {
    throw ParseError("bad state id \"" + field + "\"", line_number);
  }
  return value;
}

Label ParseLabel(const std::string& field, int line_number) {
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value < 0) {
    throw ParseError("bad label \"" + field + "\"", line_number);
  }
  return value;
}

double ParseWeightField(const std::string& field, int line_number) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("bad weight \"" + field + "\"", line_number);
  }
  return value;
}

void EnsureState(Wfst* fst, int state) {
  while (fst->NumStates() <= state) fst->AddState();
}

}  // namespace

Wfst ReadFstText(std::istream& in) {
  Wfst fst;
  std::string line;
  int line_number = 0;
  bool saw_record = false;
  while (std::getline(in, line)) {
    ++line_number;
    const std::vector<std::string> fields = SplitFields(line);
    if (fields.empty()) continue;
    const int src = ParseStateId(fields[0], line_number);
    EnsureState(&fst, src);
    if (!saw_record) {
      fst.SetStart(src);
      saw_record = true;
    }
    switch (fields.size()) {
      case 2: {
        fst.SetFinal(src, ParseWeightField(fields[1], line_number));
        break;
      }
      case 4: {
        const int dst = ParseStateId(fields[1], line_number);
        const Label label = ParseLabel(fields[2], line_number);
        const double weight = ParseWeightField(fields[3], line_number);
        EnsureState(&fst, dst);
        fst.AddArc(src, Arc{label, label, weight, dst});
        break;
      }
      case 5: {
        const int dst = ParseStateId(fields[1], line_number);
        const Label ilabel = ParseLabel(fields[2], line_number);
        const Label olabel = ParseLabel(fields[3], line_number);
        const double weight = ParseWeightField(fields[4], line_number);
        EnsureState(&fst, dst);
        fst.AddArc(src, Arc{ilabel, olabel, weight, dst});
        break;
      }
      default:
        throw ParseError("expected 2, 4, or 5 fields, got " +
                             std::to_string(fields.size()),
                         line_number);
    }
  }
  return fst;
}

Wfst ReadFstTextFromString(const std::string& text) {
  std::istringstream in(text);
  return ReadFstText(in);
}

namespace {

void WriteArcs(const Wfst& fst, int state, std::ostream& out) {
  for (const Arc& arc : fst.Arcs(state)) {
    out << state << ' ' << arc.target << ' ' << arc.ilabel << ' ' << arc.olabel
        << ' ' << FormatWeight(arc.weight) << '\n';
  }
}

}  // namespace

void WriteFstText(const Wfst& fst, std::ostream& out) {
  if (!fst.HasStart()) return;
  const int start = fst.Start();
  if (fst.Arcs(start).empty()) {
    out << start << ' ' << FormatWeight(fst.Final(start)) << '\n';
  } else {
    WriteArcs(fst, start, out);
  }
  for (int state = 0; state < fst.NumStates(); ++state) {
    if (state == start) continue;
    WriteArcs(fst, state, out);
  }
  for (int state = 0; state < fst.NumStates(); ++state) {
    if (state == start && fst.Arcs(start).empty()) continue;
    if (fst.Final(state) != SemiringZero()) {
      out << state << ' ' << FormatWeight(fst.Final(state)) << '\n';
    }
  }
}

std::string WriteFstTextToString(const Wfst& fst) {
  std::ostringstream out;
  WriteFstText(fst, out);
  return out.str();
}

SymbolTable ReadSymbolTable(std::istream& in) {
  SymbolTable symbols;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::vector<std::string> fields = SplitFields(line);
    if (fields.empty()) continue;
    if (fields.size() != 2) {
      throw ParseError("expected `name id`, got " +
                           std::to_string(fields.size()) + " fields",
                       line_number);
    }
    symbols.AddSymbol(fields[0], ParseLabel(fields[1], line_number));
  }
  return symbols;
}

void WriteSymbolTable(const SymbolTable& symbols, std::ostream& out) {
  for (const auto& [id, name] : symbols.IdToName()) {
    out << name << ' ' << id << '\n';
  }
}

std::string FormatWeight(double w) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), w);
  return std::string(buffer, ptr);
}

}  // namespace sfst
