// sfst/semiring.h
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
// Weight algebras: the probability semiring (R>=0, +, *) used for all
// measures, and the max-times semiring used for most-likely-path queries.
// Weights are plain nonnegative doubles in the real domain.

#ifndef SFST_SEMIRING_H_
#define SFST_SEMIRING_H_

#include <algorithm>
#include <string>

#include "sfst/error.h"

namespace sfst {

// Nonnegative real probability mass attached to arcs and final states.
using Weight = double;

enum class SemiringKind {
  kProbability,  // plus = +, times = *
  kMaxTimes,     // plus = max, times = *
};

// Guard for the 1/(1-a) pole. Loop weights this close to 1 are treated as
// divergent.
inline constexpr double kStarSingularityTolerance = 1e-12;

inline constexpr Weight SemiringZero() { return 0.0; }
inline constexpr Weight SemiringOne() { return 1.0; }

inline Weight Plus(SemiringKind kind, Weight a, Weight b) {
  return kind == SemiringKind::kProbability ? a + b : std::max(a, b);
}

// Times and the identities coincide in both semirings.
inline Weight Times(Weight a, Weight b) { return a * b; }

// Star closure a* = 1/(1-a), the sum of the geometric series over the
// probability semiring. Throws DivergentClosureError when a >= 1 - tolerance,
// which signals a cycle whose total mass diverges.
inline Weight Star(Weight a, double tolerance = kStarSingularityTolerance) {
  if (a >= 1.0 - tolerance) {
    throw DivergentClosureError("star closure diverges for loop weight " +
                                std::to_string(a));
  }
  return 1.0 / (1.0 - a);
}

}  // namespace sfst

#endif  // SFST_SEMIRING_H_
