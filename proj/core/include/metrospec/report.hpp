// Copyright 2026 The metrospec Authors
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

#include <optional>
#include <string>
#include <vector>

#include "metrospec/conditions.hpp"
#include "metrospec/control_synth.hpp"
#include "metrospec/qfi.hpp"
#include "metrospec/spectral.hpp"

namespace metrospec {

/// Full analysis of one channel family: peripheral table, achievability
/// verdicts, asymptotic coefficients, and (when run) the control solution.
struct AnalysisReport {
  int dim = 0;
  double theta0 = 0.0;
  PeripheralSpectrum peripheral;
  HlVerdict corollary1;
  HlVerdict corollary2;
  Theorem2Conditions theorem2;
  std::optional<HnksResult> hnks;  // only with Kraus derivatives
  std::optional<AsymptoticQfiReport> asymptotic;
  std::optional<std::string> asymptotic_error;
  std::optional<ControlSolution> control;
  std::vector<std::string> warnings;
};

/// Runs the checker pipeline. The asymptotic section uses rho0 when given,
/// otherwise the witness state of the first Achievable verdict.
AnalysisReport analyze_channel(const ParamChannel& pc,
                               const std::optional<DensityMatrix>& rho0 = {},
                               const std::optional<KrausChannel>& kraus = {},
                               const std::vector<CMatrix>& kraus_dots = {});

std::string render_text(const AnalysisReport& report);
std::string render_json(const AnalysisReport& report);

struct SweepRow {
  long n = 0;
  double qfi = 0.0;
  double assoc_qfi = 0.0;
  double lower_bound = 0.0;
};

std::vector<SweepRow> sweep_rows(const ParamChannel& pc, const DensityMatrix& rho0,
                                 const std::optional<CMatrix>& control, long n_min, long n_max);

/// Fixed header `N,qfi,assoc_qfi,lower_bound`; byte-deterministic.
std::string sweep_csv(const std::vector<SweepRow>& rows);

std::string control_solution_json(const ControlSolution& solution);

}  // namespace metrospec
