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

#include "cwl/bethe.hpp"

namespace cwl {

cplx transmission_phase(double E, int n, double kappa) {
  if (n < 1) throw ConfigError("bound-state size n must be >= 1");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  const double w = 0.5 * kappa * n * n;
  // Exact division of the conjugate pair keeps |t| = 1 to rounding.
  const cplx num(E, -w);
  return num / std::conj(num);
}

}  // namespace cwl
