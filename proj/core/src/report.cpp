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

#include "metrospec/report.hpp"

#include <cstdio>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "metrospec/config.hpp"
#include "metrospec/errors.hpp"

namespace metrospec {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", x);
  return buffer;
}

std::string fmt(Complex z) {
  char buffer[96];
  std::snprintf(buffer, sizeof(buffer), "%+.9g%+.9gi", z.real(), z.imag());
  return buffer;
}

const char* status_name(HlStatus status) {
  switch (status) {
    case HlStatus::achievable:
      return "Achievable";
    case HlStatus::not_detected:
      return "NotDetected";
    case HlStatus::inconclusive:
      return "Inconclusive";
  }
  return "?";
}

const char* hnks_name(HnksStatus status) {
  switch (status) {
    case HnksStatus::in_span:
      return "InSpan";
    case HnksStatus::not_in_span:
      return "NotInSpan";
    case HnksStatus::ill_defined:
      return "IllDefined";
  }
  return "?";
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json verdict_json(const HlVerdict& verdict) {
  json j;
  j["status"] = status_name(verdict.status);
  j["diagnostics"] = verdict.diagnostics;
  if (verdict.witness) {
    json w;
    w["eigenvalue_index"] = verdict.witness->eigenvalue_index;
    w["lambda"] = complex_json(verdict.witness->lambda);
    w["lambda_dot"] = complex_json(verdict.witness->lambda_dot);
    w["rho0"] = matrix_json(verdict.witness->rho0.rho);
    j["witness"] = std::move(w);
  }
  return j;
}

json trace_json(const SynthesisTrace& trace) {
  json j;
  j["refine_rounds"] = trace.refine_rounds;
  j["subspace_counts"] = trace.subspace_counts;
  j["components"] = trace.components;
  j["vector_count"] = trace.vector_count;
  return j;
}

}  // namespace

AnalysisReport analyze_channel(const ParamChannel& pc,
                               const std::optional<DensityMatrix>& rho0,
                               const std::optional<KrausChannel>& kraus,
                               const std::vector<CMatrix>& kraus_dots) {
  AnalysisReport report;
  report.theta0 = pc.theta0;
  report.peripheral = peripheral_spectrum(pc);
  report.dim = report.peripheral.dim;
  report.warnings = report.peripheral.warnings;

  report.corollary1 = check_corollary1(pc);
  report.corollary2 = check_corollary2(pc);
  report.theorem2 = check_theorem2_conditions(pc);
  if (kraus && !kraus_dots.empty()) report.hnks = hnks_check(*kraus, kraus_dots);

  std::optional<DensityMatrix> input = rho0;
  if (!input && report.corollary1.witness) input = report.corollary1.witness->rho0;
  if (!input && report.corollary2.witness) input = report.corollary2.witness->rho0;

  if (input) {
    try {
      report.asymptotic = asymptotic_qfi(pc, *input);
    } catch (const Error& e) {
      report.asymptotic_error = e.what();
    }
  } else {
    report.asymptotic_error =
        "no input state: no witness detected and none supplied";
  }
  return report;
}

std::string render_text(const AnalysisReport& report) {
  std::ostringstream out;
  out << "dim=" << report.dim << " theta0=" << fmt(report.theta0) << "\n";
  out << "peripheral spectrum (tol " << fmt(report.peripheral.tolerance_used) << "):\n";
  out << "  idx  lambda                        |lambda|      lambda_dot                  "
         "fixed_point\n";
  for (size_t i = 0; i < report.peripheral.entries.size(); ++i) {
    const PeripheralEntry& e = report.peripheral.entries[i];
    char line[256];
    std::snprintf(line, sizeof(line), "  %-4zu %-29s %-13s %-27s %s\n", i,
                  fmt(e.lambda).c_str(), fmt(std::abs(e.lambda)).c_str(),
                  e.lambda_dot ? fmt(*e.lambda_dot).c_str() : "unavailable",
                  e.is_fixed_point ? "yes" : "no");
    out << line;
  }

  auto print_verdict = [&out](const char* name, const HlVerdict& verdict) {
    out << "  " << name << ": " << status_name(verdict.status);
    if (verdict.witness)
      out << " (eigenvalue #" << verdict.witness->eigenvalue_index
          << ", lambda_dot=" << fmt(verdict.witness->lambda_dot) << ")";
    out << "\n";
    for (const std::string& d : verdict.diagnostics) out << "    - " << d << "\n";
  };

  out << "verdicts:\n";
  print_verdict("corollary1", report.corollary1);
  print_verdict("corollary2", report.corollary2);
  out << "  theorem2: unital=" << (report.theorem2.unital ? "yes" : "no")
      << " signal_nonvanishing=" << (report.theorem2.signal_nonvanishing ? "yes" : "no")
      << " signal_normal=" << (report.theorem2.signal_normal ? "yes" : "no")
      << " candidates=" << report.theorem2.r0_candidates.size() << "\n";
  if (report.hnks) {
    out << "  hnks: " << hnks_name(report.hnks->status);
    if (report.hnks->status != HnksStatus::ill_defined)
      out << " (residual=" << fmt(report.hnks->residual) << ")";
    out << "\n";
  } else {
    out << "  hnks: unavailable (needs Kraus derivatives)\n";
  }

  if (report.asymptotic) {
    const AsymptoticQfiReport& a = *report.asymptotic;
    out << "asymptotic qfi:\n";
    out << "  oscillation_period: "
        << (a.oscillation_period ? std::to_string(*a.oscillation_period) : std::string("none"))
        << "\n";
    for (const AsymptoticClass& cls : a.classes) {
      out << "  class " << cls.residue << ": n2=" << fmt(cls.n2);
      if (cls.n1) out << " n1=" << fmt(*cls.n1);
      out << "\n";
    }
    out << "  achieves_hl: " << (a.achieves_hl ? "yes" : "no") << "\n";
  } else if (report.asymptotic_error) {
    out << "asymptotic qfi: unavailable (" << *report.asymptotic_error << ")\n";
  }

  if (report.control) {
    out << "control solution: succeeded=" << (report.control->succeeded ? "yes" : "no")
        << " sanity_residual=" << fmt(report.control->sanity_residual) << "\n";
  }

  if (!report.warnings.empty()) {
    out << "warnings:\n";
    for (const std::string& w : report.warnings) out << "  - " << w << "\n";
  }
  return out.str();
}

std::string render_json(const AnalysisReport& report) {
  json j;
  j["dim"] = report.dim;
  j["theta0"] = report.theta0;

  json peripheral = json::array();
  for (const PeripheralEntry& e : report.peripheral.entries) {
    json entry;
    entry["lambda"] = complex_json(e.lambda);
    entry["abs_lambda"] = std::abs(e.lambda);
    if (e.lambda_dot) entry["lambda_dot"] = complex_json(*e.lambda_dot);
    entry["is_fixed_point"] = e.is_fixed_point;
    entry["cluster"] = e.cluster;
    peripheral.push_back(std::move(entry));
  }
  j["peripheral"] = std::move(peripheral);
  j["peripheral_tolerance"] = report.peripheral.tolerance_used;

  j["corollary1"] = verdict_json(report.corollary1);
  j["corollary2"] = verdict_json(report.corollary2);
  j["theorem2"] = {{"unital", report.theorem2.unital},
                   {"signal_nonvanishing", report.theorem2.signal_nonvanishing},
                   {"signal_normal", report.theorem2.signal_normal},
                   {"candidates", report.theorem2.r0_candidates.size()}};
  if (report.hnks) {
    j["hnks"] = {{"status", hnks_name(report.hnks->status)},
                 {"residual", report.hnks->residual}};
  }

  if (report.asymptotic) {
    const AsymptoticQfiReport& a = *report.asymptotic;
    json asym;
    asym["n2_coefficient"] = a.n2_coefficient;
    if (a.n1_coefficient) asym["n1_coefficient"] = *a.n1_coefficient;
    if (a.oscillation_period) asym["oscillation_period"] = *a.oscillation_period;
    asym["achieves_hl"] = a.achieves_hl;
    json classes = json::array();
    for (const AsymptoticClass& cls : a.classes) {
      json c;
      c["residue"] = cls.residue;
      c["n2"] = cls.n2;
      if (cls.n1) c["n1"] = *cls.n1;
      c["beta"] = matrix_json(cls.beta);
      classes.push_back(std::move(c));
    }
    asym["classes"] = std::move(classes);
    j["asymptotic"] = std::move(asym);
  } else if (report.asymptotic_error) {
    j["asymptotic_error"] = *report.asymptotic_error;
  }

  if (report.control) {
    json c;
    c["u_c"] = matrix_json(report.control->u_c);
    c["sanity_residual"] = report.control->sanity_residual;
    c["succeeded"] = report.control->succeeded;
    c["trace"] = trace_json(report.control->trace);
    j["control"] = std::move(c);
  }
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::vector<SweepRow> sweep_rows(const ParamChannel& pc, const DensityMatrix& rho0,
                                 const std::optional<CMatrix>& control, long n_min, long n_max) {
  if (n_min < 1) throw DomainViolation("sweep: n_min must be at least 1");
  if (n_max > 10000) throw DomainViolation("sweep: n_max above the matrix-power cost guard");
  if (n_max < n_min) throw DomainViolation("sweep: n_max below n_min");

  std::vector<SequenceQfi> figures = exact_sequence_qfi_range(pc, rho0, control, n_min, n_max);
  std::vector<SweepRow> rows;
  rows.reserve(figures.size());
  for (size_t i = 0; i < figures.size(); ++i) {
    rows.push_back(SweepRow{n_min + static_cast<long>(i), figures[i].qfi, figures[i].associated,
                            figures[i].bound});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "N,qfi,assoc_qfi,lower_bound\n";
  for (const SweepRow& row : rows) {
    char line[160];
    std::snprintf(line, sizeof(line), "%ld,%.12g,%.12g,%.12g\n", row.n, row.qfi, row.assoc_qfi,
                  row.lower_bound);
    out += line;
  }
  return out;
}

std::string control_solution_json(const ControlSolution& solution) {
  json j;
  j["u_c"] = matrix_json(solution.u_c);
  j["sanity_residual"] = solution.sanity_residual;
  j["succeeded"] = solution.succeeded;
  j["trace"] = trace_json(solution.trace);
  return j.dump(2) + "\n";
}

}  // namespace metrospec
