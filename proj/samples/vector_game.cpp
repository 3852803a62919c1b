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

// Vector source with n_X = n_Y = 2: solves the Stackelberg game, shows the
// whitening spectrum, and samples deviating encoders against it.

#include <cstdio>

#include "privsig/equilibrium.hpp"
#include "privsig/verify.hpp"

int main() {
  const privsig::SymMatrix sigma{{1.0, 0.2, 0.5, 0.1},
                                 {0.2, 1.5, 0.3, 0.6},
                                 {0.5, 0.3, 1.2, 0.1},
                                 {0.1, 0.6, 0.1, 0.9}};
  const privsig::GameSpec spec{privsig::JointGaussian(2, 2, sigma), 0.5};
  const privsig::NashSolution s = privsig::SolveStackelberg(spec);

  std::printf("eigenvalues of W:");
  for (double l : s.transform.spectrum.lambda) std::printf(" %.6f", l);
  std::printf("\nJ^e = %.6f, mse_x = %.6f, mse_y = %.6f\n", s.report.j_e,
              s.report.mse_x, s.report.mse_y);

  privsig::StackelbergOptions opt;
  opt.seed = 7;
  const privsig::DeviationReport dev = privsig::CheckStackelberg(spec, s.policy, opt);
  std::printf("%zu deviations tested, best J^e %.6f (margin %.3g): %s\n", dev.tested,
              dev.best_deviation_je, dev.margin, privsig::VerdictName(dev.verdict));
  return dev.certified() ? 0 : 1;
}
