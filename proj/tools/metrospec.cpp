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

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "metrospec/channel_file.hpp"
#include "metrospec/channels.hpp"
#include "metrospec/conditions.hpp"
#include "metrospec/config.hpp"
#include "metrospec/control_synth.hpp"
#include "metrospec/errors.hpp"
#include "metrospec/report.hpp"
#include "metrospec/scenarios.hpp"

using namespace metrospec;

namespace {

constexpr int kExitBadFile = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitNonConvergence = 4;
constexpr int kExitConditions = 5;
constexpr int kExitSanity = 6;

CMatrix parse_matrix_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw FileFormatError("expected a nested matrix array");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw FileFormatError("matrix rows have inconsistent lengths");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& z = j[i][c];
      if (!z.is_array() || z.size() != 2)
        throw FileFormatError("complex values must be [re, im] pairs");
      m(i, c) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return m;
}

// Accepts a bare matrix or an object holding one under a known key.
CMatrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileFormatError("cannot open matrix file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FileFormatError(std::string("invalid JSON: ") + e.what());
  }
  if (j.is_object()) {
    for (const char* key : {"u_c", "rho", "matrix"})
      if (j.contains(key)) return parse_matrix_json(j[key]);
    throw FileFormatError("no matrix found under keys u_c/rho/matrix");
  }
  return parse_matrix_json(j);
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw FileFormatError("cannot write output file: " + out_path);
  out << text;
}

struct ScenarioOptions {
  std::string name;
  double theta0 = 0.0;
  std::string p_of_theta = "constant";
  double p = 0.0;
  std::string phi_of_theta = "constant";
  double phi = 0.7853981633974483;  // pi/4
  HeisenbergParams heisenberg;
};

Scenario build_scenario(const ScenarioOptions& opt) {
  if (opt.name == "dephasing") {
    ScalarFn p_fn;
    std::optional<ScalarFn> dp_fn;
    if (opt.p_of_theta == "linear") {
      double base = opt.p;
      p_fn = [base](double th) { return base + th; };
      dp_fn = ScalarFn([](double) { return 1.0; });
    } else if (opt.p_of_theta == "constant") {
      double base = opt.p;
      p_fn = [base](double) { return base; };
      dp_fn = ScalarFn([](double) { return 0.0; });
    } else {
      throw DomainViolation("--p-of-theta must be 'constant' or 'linear'");
    }
    ScalarFn phi_fn;
    std::optional<ScalarFn> dphi_fn;
    if (opt.phi_of_theta == "linear") {
      double base = opt.phi;
      phi_fn = [base](double th) { return base + th; };
      dphi_fn = ScalarFn([](double) { return 1.0; });
    } else if (opt.phi_of_theta == "constant") {
      double base = opt.phi;
      phi_fn = [base](double) { return base; };
      dphi_fn = ScalarFn([](double) { return 0.0; });
    } else {
      throw DomainViolation("--phi-of-theta must be 'constant' or 'linear'");
    }
    return dephasing(p_fn, phi_fn, opt.theta0, dp_fn, dphi_fn);
  }
  if (opt.name == "qutrit-decay") return qutrit_decay(opt.theta0);
  if (opt.name == "heisenberg") {
    HeisenbergParams params = opt.heisenberg;
    params.theta0 = opt.theta0;
    return heisenberg_noisy(params);
  }
  throw DomainViolation("unknown scenario '" + opt.name +
                        "' (expected dephasing, qutrit-decay, heisenberg)");
}

ChannelFile scenario_to_file(const Scenario& scenario, double fd_step) {
  const ParamChannel& pc = scenario.channel;
  TransitionMatrix t0 = pc.at(pc.theta0);

  ChannelFile file;
  file.dim = t0.dim;
  file.theta0 = pc.theta0;
  file.fd_step = fd_step;
  for (double theta : {pc.theta0 - fd_step, pc.theta0, pc.theta0 + fd_step}) {
    try {
      file.samples.emplace_back(theta, pc.at(theta).t);
    } catch (const DomainViolation&) {
      // Sample point outside the family domain; the sidecar still carries
      // the exact derivative.
    }
  }
  file.transition_dot = derivative(pc);
  return file;
}

struct LoadedChannel {
  ParamChannel channel;
  std::optional<KrausChannel> kraus;
  std::vector<CMatrix> kraus_dots;
  std::function<DensityMatrix(double)> default_input;
};

LoadedChannel load_input(const std::string& file_path, const std::string& scenario_name,
                         const ScenarioOptions& opt) {
  LoadedChannel loaded;
  if (!scenario_name.empty()) {
    ScenarioOptions named = opt;
    named.name = scenario_name;
    Scenario scenario = build_scenario(named);
    loaded.channel = scenario.channel;
    if (scenario.kraus_at) loaded.kraus = scenario.kraus_at(scenario.channel.theta0);
    if (scenario.kraus_dots_at)
      loaded.kraus_dots = scenario.kraus_dots_at(scenario.channel.theta0);
    loaded.default_input = scenario.default_input;
    return loaded;
  }
  ChannelFile file = load_channel_file(file_path);
  loaded.channel = channel_from_file(file);
  if (!file.kraus.empty()) loaded.kraus = make_kraus_channel(file.kraus);
  loaded.kraus_dots = file.kraus_dots;
  return loaded;
}

int run(int argc, char** argv) {
  CLI::App app{"quantum-channel analysis for ancilla-free sequential metrology"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "peripheral spectrum, verdicts, asymptotics");
  std::string analyze_file;
  std::string analyze_input;
  bool analyze_json = false;
  analyze->add_option("file", analyze_file, "channel file (JSON)")->required();
  analyze->add_option("--input", analyze_input, "input state file (density matrix JSON)");
  analyze->add_flag("--json", analyze_json, "machine-readable output");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "exact finite-N QFI rows as CSV");
  std::string sweep_file, sweep_scenario, sweep_control = "none", sweep_out, sweep_input;
  long n_min = 1, n_max = 50;
  double sweep_alpha = 0.2;
  ScenarioOptions sweep_opt;
  sweep->add_option("file", sweep_file, "channel file (JSON)");
  sweep->add_option("--scenario", sweep_scenario, "built-in scenario name");
  sweep->add_option("--n-min", n_min, "first N");
  sweep->add_option("--n-max", n_max, "last N");
  sweep->add_option("--alpha", sweep_alpha, "input-state mixing parameter");
  sweep->add_option("--control", sweep_control, "none | auto | control file");
  sweep->add_option("--input", sweep_input, "input state file (overrides --alpha)");
  sweep->add_option("--out", sweep_out, "output CSV path (default stdout)");
  sweep->add_option("--theta0", sweep_opt.theta0, "scenario theta0");
  sweep->add_option("--p-of-theta", sweep_opt.p_of_theta, "dephasing p(theta): constant|linear");
  sweep->add_option("--p", sweep_opt.p, "dephasing p base value");
  sweep->add_option("--phi-of-theta", sweep_opt.phi_of_theta,
                    "dephasing phi(theta): constant|linear");
  sweep->add_option("--phi", sweep_opt.phi, "dephasing phi base value");
  sweep->add_option("--t", sweep_opt.heisenberg.t, "heisenberg evolution time");
  sweep->add_option("--p1", sweep_opt.heisenberg.p1, "heisenberg noise weight 1");
  sweep->add_option("--p2", sweep_opt.heisenberg.p2, "heisenberg noise weight 2");
  sweep->add_option("--p3", sweep_opt.heisenberg.p3, "heisenberg noise weight 3");
  sweep->add_option("--phi1", sweep_opt.heisenberg.phi[0], "heisenberg noise phase 1");
  sweep->add_option("--phi2", sweep_opt.heisenberg.phi[1], "heisenberg noise phase 2");
  sweep->add_option("--phi3", sweep_opt.heisenberg.phi[2], "heisenberg noise phase 3");
  sweep->add_option("--phi4", sweep_opt.heisenberg.phi[3], "heisenberg noise phase 4");

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "identify the interleaving unitary control");
  std::string synth_file, synth_scenario, synth_r0 = "auto", synth_out;
  ScenarioOptions synth_opt;
  synth->add_option("file", synth_file, "channel file (JSON)");
  synth->add_option("--scenario", synth_scenario, "built-in scenario name");
  synth->add_option("--r0", synth_r0, "auto | candidate index");
  synth->add_option("--out", synth_out, "output JSON path (default stdout)");
  synth->add_option("--theta0", synth_opt.theta0, "scenario theta0");
  synth->add_option("--t", synth_opt.heisenberg.t, "heisenberg evolution time");
  synth->add_option("--p1", synth_opt.heisenberg.p1, "heisenberg noise weight 1");
  synth->add_option("--p2", synth_opt.heisenberg.p2, "heisenberg noise weight 2");
  synth->add_option("--p3", synth_opt.heisenberg.p3, "heisenberg noise weight 3");
  synth->add_option("--phi1", synth_opt.heisenberg.phi[0], "heisenberg noise phase 1");
  synth->add_option("--phi2", synth_opt.heisenberg.phi[1], "heisenberg noise phase 2");
  synth->add_option("--phi3", synth_opt.heisenberg.phi[2], "heisenberg noise phase 3");
  synth->add_option("--phi4", synth_opt.heisenberg.phi[3], "heisenberg noise phase 4");

  // scenario
  auto* scen = app.add_subcommand("scenario", "materialize a built-in scenario as a channel file");
  ScenarioOptions scen_opt;
  std::string scen_out;
  double scen_fd_step = 1e-6;
  scen->add_option("name", scen_opt.name, "dephasing | qutrit-decay | heisenberg")->required();
  scen->add_option("--theta0", scen_opt.theta0, "expansion point");
  scen->add_option("--p-of-theta", scen_opt.p_of_theta, "dephasing p(theta): constant|linear");
  scen->add_option("--p", scen_opt.p, "dephasing p base value");
  scen->add_option("--phi-of-theta", scen_opt.phi_of_theta,
                   "dephasing phi(theta): constant|linear");
  scen->add_option("--phi", scen_opt.phi, "dephasing phi base value");
  scen->add_option("--t", scen_opt.heisenberg.t, "heisenberg evolution time");
  scen->add_option("--p1", scen_opt.heisenberg.p1, "heisenberg noise weight 1");
  scen->add_option("--p2", scen_opt.heisenberg.p2, "heisenberg noise weight 2");
  scen->add_option("--p3", scen_opt.heisenberg.p3, "heisenberg noise weight 3");
  scen->add_option("--phi1", scen_opt.heisenberg.phi[0], "heisenberg noise phase 1");
  scen->add_option("--phi2", scen_opt.heisenberg.phi[1], "heisenberg noise phase 2");
  scen->add_option("--phi3", scen_opt.heisenberg.phi[2], "heisenberg noise phase 3");
  scen->add_option("--phi4", scen_opt.heisenberg.phi[3], "heisenberg noise phase 4");
  scen->add_option("--fd-step", scen_fd_step, "sample spacing around theta0");
  scen->add_option("--out", scen_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (analyze->parsed()) {
    LoadedChannel loaded = load_input(analyze_file, "", {});
    std::optional<DensityMatrix> rho0;
    if (!analyze_input.empty()) rho0 = make_density_matrix(load_matrix_file(analyze_input));
    AnalysisReport report =
        analyze_channel(loaded.channel, rho0, loaded.kraus, loaded.kraus_dots);
    write_output(analyze_json ? render_json(report) : render_text(report), "");
    return 0;
  }

  if (sweep->parsed()) {
    if (sweep_file.empty() == sweep_scenario.empty())
      throw DomainViolation("sweep needs exactly one of a channel file or --scenario");
    LoadedChannel loaded = load_input(sweep_file, sweep_scenario, sweep_opt);

    DensityMatrix rho0 = [&] {
      if (!sweep_input.empty()) return make_density_matrix(load_matrix_file(sweep_input));
      if (loaded.default_input) return loaded.default_input(sweep_alpha);
      AnalysisReport probe = analyze_channel(loaded.channel);
      if (probe.corollary1.witness) return probe.corollary1.witness->rho0;
      if (probe.corollary2.witness) return probe.corollary2.witness->rho0;
      std::cerr << "note: no witness input state detected, using the maximally mixed state\n";
      int d = loaded.channel.at(loaded.channel.theta0).dim;
      return make_density_matrix(CMatrix::Identity(d, d) / double(d));
    }();

    std::optional<CMatrix> control;
    if (sweep_control == "auto") {
      Theorem2Conditions cond = check_theorem2_conditions(loaded.channel);
      if (!cond.unital || !cond.signal_nonvanishing || !cond.signal_normal ||
          cond.r0_candidates.empty()) {
        std::cerr << "error: control synthesis conditions not met\n";
        return kExitConditions;
      }
      ControlSolution solution =
          synthesize_control(loaded.channel.at(loaded.channel.theta0), cond.r0_candidates[0]);
      if (!solution.succeeded) {
        std::cerr << "error: control sanity check failed (residual "
                  << solution.sanity_residual << ")\n";
        return kExitSanity;
      }
      control = solution.u_c;
    } else if (sweep_control != "none") {
      control = load_matrix_file(sweep_control);
    }

    std::vector<SweepRow> rows = sweep_rows(loaded.channel, rho0, control, n_min, n_max);
    write_output(sweep_csv(rows), sweep_out);
    return 0;
  }

  if (synth->parsed()) {
    if (synth_file.empty() == synth_scenario.empty())
      throw DomainViolation("synthesize needs exactly one of a channel file or --scenario");
    LoadedChannel loaded = load_input(synth_file, synth_scenario, synth_opt);

    Theorem2Conditions cond = check_theorem2_conditions(loaded.channel);
    if (!cond.unital) {
      std::cerr << "error: conditions not met: channel is not unital\n";
      return kExitConditions;
    }
    if (!cond.signal_nonvanishing) {
      std::cerr << "error: conditions not met: projected signal vanishes\n";
      return kExitConditions;
    }
    if (!cond.signal_normal) {
      std::cerr << "error: conditions not met: projected signal is not normal\n";
      return kExitConditions;
    }

    size_t index = 0;
    if (synth_r0 != "auto") index = static_cast<size_t>(std::stoul(synth_r0));
    if (index >= cond.r0_candidates.size()) {
      std::cerr << "error: r0 index out of range (have " << cond.r0_candidates.size()
                << " candidates)\n";
      return kExitBadFile;
    }

    ControlSolution solution =
        synthesize_control(loaded.channel.at(loaded.channel.theta0), cond.r0_candidates[index]);
    write_output(control_solution_json(solution), synth_out);
    if (!solution.succeeded) {
      std::cerr << "error: sanity check failed; no unitary satisfies the "
                   "equivalence condition for this eigenmatrix\n";
      return kExitSanity;
    }
    return 0;
  }

  if (scen->parsed()) {
    Scenario scenario = build_scenario(scen_opt);
    ChannelFile file = scenario_to_file(scenario, scen_fd_step);
    write_output(serialize_channel_file(file), scen_out);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  metrospec::load_tolerances_from_env();
  try {
    return run(argc, argv);
  } catch (const FileFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadFile;
  } catch (const InvalidChannel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const NoConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const DegenerateUnresolved& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const AlgorithmInvariantViolated& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const RankDeficientSignal& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const DegeneratePurity& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadFile;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadFile;
  }
}
