//
// Copyright 2026 The privsig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Solves a scalar instance, certifies it, and compares the noiseless,
// AWGN and 8-level discrete channels at the same (rho, delta).

#include <cstdio>

#include "privsig/channel.hpp"
#include "privsig/equilibrium.hpp"
#include "privsig/verify.hpp"

int main() {
  const double rho = 0.75;
  const double delta = 1.0;
  const privsig::NashSolution nash = privsig::SolveScalar(1.0, 1.0, rho, delta);
  const privsig::DeviationReport check = privsig::CheckNashScalar(nash);
  std::printf("B/A = %.6f, best-response check: %s\n", *nash.b_over_a,
              privsig::VerdictName(check.verdict));

  const privsig::NoisyEquilibrium awgn =
      privsig::SolveAwgn(1.0, 1.0, rho, delta, /*power=*/1.0, /*noise_var=*/0.1);
  const privsig::DiscreteEquilibrium disc =
      privsig::SolveDiscrete(1.0, 1.0, rho, delta, /*levels=*/8);

  std::printf("%-10s %10s %10s %10s\n", "channel", "mse_x", "mse_y", "j_e");
  std::printf("%-10s %10.6f %10.6f %10.6f\n", "noiseless", nash.report.mse_x,
              nash.report.mse_y, nash.report.j_e);
  std::printf("%-10s %10.6f %10.6f %10.6f\n", "awgn", awgn.report.mse_x,
              awgn.report.mse_y, awgn.report.j_e);
  std::printf("%-10s %10.6f %10.6f %10.6f\n", "8 levels", disc.report.mse_x,
              disc.report.mse_y, disc.report.j_e);
  return check.certified() ? 0 : 1;
}
