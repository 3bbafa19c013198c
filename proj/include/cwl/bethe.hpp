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

#include "cwl/hilbert.hpp"

namespace cwl {

/// Phase acquired by an n-photon bound state (n = 1: scattering state) of
/// energy E passing one emitter: (E - i kappa n^2 / 2) / (E + i kappa n^2 / 2).
cplx transmission_phase(double E, int n, double kappa);

}  // namespace cwl
