// Copyright 2026 The cwl Authors
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

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace cwl {

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct SelftestOptions {
  // Reduced configuration lists for quick runs.
  bool quick = false;
  std::function<void(const CheckResult&)> on_result;
};

/// Invariant suites: propagation (trace, Hermiticity, positivity), Wigner
/// normalization and Fock-state negativity, displaced-frame equivalence,
/// kappa scaling, short-bin closed form, parity phase, metrology bounds
/// and sweep determinism.
std::vector<CheckResult> run_selftest(const SelftestOptions& opts = {});

}  // namespace cwl
