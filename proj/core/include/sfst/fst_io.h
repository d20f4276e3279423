// sfst/fst_io.h
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
// AT&T-style text serialization. One record per line:
//   arc:           src dst ilabel olabel weight
//   acceptor arc:  src dst label weight        (expands to ilabel = olabel)
//   final state:   state weight
// The first field of the first line names the start state. Symbol tables are
// lines of `name id`.

#ifndef SFST_FST_IO_H_
#define SFST_FST_IO_H_

#include <iosfwd>
#include <string>

#include "sfst/fst.h"

namespace sfst {

// Parses the text format above. Throws ParseError with the offending line
// number on malformed input. Blank lines are ignored.
Wfst ReadFstText(std::istream& in);
Wfst ReadFstTextFromString(const std::string& text);

// Canonical writer: the start state's records come first (its arcs, or its
// final line when it has none), then remaining arcs by state, then final
// lines by state. ReadFstText(WriteFstText(fst)) reproduces the structure
// exactly for any automaton whose every state appears in some record.
void WriteFstText(const Wfst& fst, std::ostream& out);
std::string WriteFstTextToString(const Wfst& fst);

SymbolTable ReadSymbolTable(std::istream& in);
void WriteSymbolTable(const SymbolTable& symbols, std::ostream& out);

// Shortest decimal form that parses back to exactly the same double.
std::string FormatWeight(double w);

}  // namespace sfst

#endif  // SFST_FST_IO_H_
