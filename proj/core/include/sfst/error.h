// sfst/error.h
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
// Exception types thrown by the toolkit.

#ifndef SFST_ERROR_H_
#define SFST_ERROR_H_

#include <stdexcept>
#include <string>

namespace sfst {

// Base class for every error raised by this library.
class SfstError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A star closure 1/(1-a) was requested for a >= 1 - tolerance: the
// geometric series does not converge.
class DivergentClosureError : public SfstError {
 public:
  using SfstError::SfstError;
};

// The grand total weight of an automaton diverges, so it cannot be
// normalized.
class DivergentTotalError : public DivergentClosureError {
 public:
  using DivergentClosureError::DivergentClosureError;
};

// A surviving state carries zero forward mass, making reweighting undefined.
class ZeroMassStateError : public SfstError {
 public:
  using SfstError::SfstError;
};

// A state or arc id was outside the valid range of the automaton.
class InvalidStateError : public SfstError {
 public:
  using SfstError::SfstError;
};

// Malformed textual input; line() is the 1-based offending line.
class ParseError : public SfstError {
 public:
  ParseError(const std::string& what, int line)
      : SfstError(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Both composition operands carry epsilons on the matched tapes; the
// result would be ambiguous without an epsilon filter.
class EpsilonAmbiguityError : public SfstError {
 public:
  using SfstError::SfstError;
};

// The automaton has no successful path.
class EmptyAutomatonError : public SfstError {
 public:
  using SfstError::SfstError;
};

// Per-state outflow does not sum to one; direct path sampling is invalid.
class NotNormalizedError : public SfstError {
 public:
  using SfstError::SfstError;
};

// The epsilon subgraph contains a cycle; path sampling may not terminate
// in bounded time.
class EpsilonCyclicError : public SfstError {
 public:
  using SfstError::SfstError;
};

// A sampled path exceeded the configured step cap.
class StepLimitExceededError : public SfstError {
 public:
  using SfstError::SfstError;
};

// A posterior matrix violates its shape or stochasticity invariants.
class InvalidPosteriorError : public SfstError {
 public:
  using SfstError::SfstError;
};

// A sample-mode query was made on an empty sample.
class EmptySampleError : public SfstError {
 public:
  using SfstError::SfstError;
};

// A string contained a label that is reserved or out of range.
class InvalidLabelError : public SfstError {
 public:
  using SfstError::SfstError;
};

}  // namespace sfst

#endif  // SFST_ERROR_H_
