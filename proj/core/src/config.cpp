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

#include "metrospec/config.hpp"

#include <cstdlib>
#include <string>

namespace metrospec {

Tolerances& tolerances() {
  static Tolerances config;
  return config;
}

namespace {

void read_env(const char* name, double& value) {
  if (const char* text = std::getenv(name)) value = std::stod(text);
}

void read_env(const char* name, int& value) {
  if (const char* text = std::getenv(name)) value = std::stoi(text);
}

}  // namespace

void load_tolerances_from_env() {
  Tolerances& c = tolerances();
  read_env("METROSPEC_PERIPHERAL", c.peripheral);
  read_env("METROSPEC_PERIPHERAL_WARN", c.peripheral_warn);
  read_env("METROSPEC_EIG_DEGENERACY", c.eig_degeneracy);
  read_env("METROSPEC_SPECTRAL_GROUP", c.spectral_group);
  read_env("METROSPEC_FIXED_POINT", c.fixed_point);
  read_env("METROSPEC_SLD_SUPPORT", c.sld_support);
  read_env("METROSPEC_SIGNAL_SUPPORT", c.signal_support);
  read_env("METROSPEC_PURITY_MIN", c.purity_min);
  read_env("METROSPEC_SIGNAL_RANK", c.signal_rank);
  read_env("METROSPEC_HL_THRESHOLD", c.hl_threshold);
  read_env("METROSPEC_LAMBDA_DOT_NONZERO", c.lambda_dot_nonzero);
  read_env("METROSPEC_GRAM", c.gram);
  read_env("METROSPEC_SINGULAR_ZERO", c.singular_zero);
  read_env("METROSPEC_SINGULAR_UNITY", c.singular_unity);
  read_env("METROSPEC_SANITY", c.sanity);
  read_env("METROSPEC_CPTP", c.cptp);
  read_env("METROSPEC_CHOI", c.choi);
  read_env("METROSPEC_DENSITY", c.density);
  read_env("METROSPEC_REFINE_MAX_ROUNDS", c.refine_max_rounds);
  read_env("METROSPEC_MAX_OSCILLATION_PERIOD", c.max_oscillation_period);
  read_env("METROSPEC_FD_CENTRAL_STEP", c.fd_central_step);
  read_env("METROSPEC_FD_ONESIDED_STEP", c.fd_onesided_step);
  read_env("METROSPEC_FD_EIGVEC_STEP", c.fd_eigvec_step);
}

}  // namespace metrospec
