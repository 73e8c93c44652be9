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

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "metrospec/channel_file.hpp"
#include "metrospec/scenarios.hpp"

using namespace metrospec;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

const char* cli_path() {
  const char* path = std::getenv("METROSPEC_CLI");
  return path && *path ? path : nullptr;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "metrospec_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

RunResult run_cli(const std::string& args) {
  auto out_path = scratch_dir() / "stdout.txt";
  std::string command = std::string(cli_path()) + " " + args + " > " + out_path.string() +
                        " 2> /dev/null";
  int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  return result;
}

std::string write_file(const std::string& name, const std::string& content) {
  auto path = scratch_dir() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

std::string dephasing_file() {
  Scenario s = dephasing([](double th) { return th; }, [](double) { return M_PI / 4; }, 0.0,
                         ScalarFn([](double) { return 1.0; }),
                         ScalarFn([](double) { return 0.0; }));
  ChannelFile file;
  file.dim = 2;
  file.theta0 = 0.0;
  for (double theta : {0.0, 1e-6}) file.samples.emplace_back(theta, s.channel.at(theta).t);
  file.transition_dot = derivative(s.channel);
  return write_file("dephasing.json", serialize_channel_file(file));
}

std::string static_file() {
  Scenario s = dephasing([](double) { return 0.2; }, [](double) { return 0.9; }, 0.0,
                         ScalarFn([](double) { return 0.0; }),
                         ScalarFn([](double) { return 0.0; }));
  ChannelFile file;
  file.dim = 2;
  file.theta0 = 0.0;
  file.transition = s.channel.at(0.0).t;
  return write_file("static.json", serialize_channel_file(file));
}

}  // namespace

TEST_CASE("cli analyze detects the dephasing example") {
  if (!cli_path()) return;  // only runs under ctest with the binary wired up
  RunResult result = run_cli("analyze " + dephasing_file());
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("corollary1: Achievable") != std::string::npos);

  RunResult json = run_cli("analyze --json " + dephasing_file());
  CHECK(json.exit_code == 0);
  CHECK(json.output.find("\"achieves_hl\": true") != std::string::npos);
}

TEST_CASE("cli analyze reports NotDetected for a static channel") {
  if (!cli_path()) return;
  RunResult result = run_cli("analyze " + static_file());
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("corollary1: NotDetected") != std::string::npos);
}

TEST_CASE("cli analyze exit codes for malformed and invalid files") {
  if (!cli_path()) return;
  std::string malformed = write_file("broken.json", "{ not json");
  CHECK(run_cli("analyze " + malformed).exit_code == 2);

  // Trace preserving but not completely positive: the transpose map.
  std::string non_cp = write_file("non_cp.json", R"({"dim": 2, "theta0": 0, "transition": [
    [[1,0],[0,0],[0,0],[0,0]],
    [[0,0],[0,0],[1,0],[0,0]],
    [[0,0],[1,0],[0,0],[0,0]],
    [[0,0],[0,0],[0,0],[1,0]]]})");
  CHECK(run_cli("analyze " + non_cp).exit_code == 3);

  CHECK(run_cli("analyze " + scratch_dir().string() + "/missing.json").exit_code == 2);
}

TEST_CASE("cli analyze output is byte-deterministic") {
  if (!cli_path()) return;
  std::string file = dephasing_file();
  RunResult a = run_cli("analyze " + file);
  RunResult b = run_cli("analyze " + file);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
}

TEST_CASE("cli sweep emits the fixed CSV header and a single row") {
  if (!cli_path()) return;
  RunResult result =
      run_cli("sweep --scenario qutrit-decay --theta0 0 --alpha 0.9 --n-min 5 --n-max 5");
  CHECK(result.exit_code == 0);
  CHECK(result.output.rfind("N,qfi,assoc_qfi,lower_bound\n5,", 0) == 0);
  CHECK(result.output == run_cli("sweep --scenario qutrit-decay --theta0 0 --alpha 0.9 "
                                 "--n-min 5 --n-max 5")
                             .output);
}

TEST_CASE("cli sweep reproduces the oscillation pattern") {
  if (!cli_path()) return;
  RunResult result =
      run_cli("sweep --scenario qutrit-decay --theta0 0 --alpha 0.9 --n-min 1 --n-max 20");
  CHECK(result.exit_code == 0);
  // Parse the qfi column and check parity-2 oscillation for N >= 10.
  std::istringstream lines(result.output);
  std::string line;
  std::getline(lines, line);  // header
  std::vector<double> qfi_rate;
  long n = 1;
  while (std::getline(lines, line)) {
    long parsed_n;
    double qfi, assoc, bound;
    REQUIRE(std::sscanf(line.c_str(), "%ld,%lg,%lg,%lg", &parsed_n, &qfi, &assoc, &bound) == 4);
    REQUIRE(parsed_n == n);
    CHECK(qfi >= bound - 1e-9);
    qfi_rate.push_back(qfi / double(n * n));
    ++n;
  }
  REQUIRE(qfi_rate.size() == 20);
  for (size_t i = 10; i + 2 < qfi_rate.size(); ++i) {
    CHECK(std::abs(qfi_rate[i] - qfi_rate[i + 2]) < 0.05 * qfi_rate[i]);
    CHECK(std::abs(qfi_rate[i] - qfi_rate[i + 1]) > 0.1 * qfi_rate[i]);
  }
}

TEST_CASE("cli synthesize on the heisenberg scenario emits the control") {
  if (!cli_path()) return;
  RunResult result = run_cli("synthesize --scenario heisenberg --theta0 0.5");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("\"succeeded\": true") != std::string::npos);
  CHECK(result.output.find("\"u_c\"") != std::string::npos);
}

TEST_CASE("cli synthesize exit 5 when conditions fail") {
  if (!cli_path()) return;
  // Static channel: the projected signal vanishes.
  CHECK(run_cli("synthesize " + static_file()).exit_code == 5);
}

TEST_CASE("cli scenario round trip") {
  if (!cli_path()) return;
  auto out = scratch_dir() / "roundtrip.json";
  RunResult emit = run_cli("scenario qutrit-decay --theta0 0 --out " + out.string());
  CHECK(emit.exit_code == 0);
  RunResult analyze = run_cli("analyze " + out.string());
  CHECK(analyze.exit_code == 0);
  CHECK(analyze.output.find("NotDetected") != std::string::npos);

  RunResult deph = run_cli("scenario dephasing --p-of-theta linear --theta0 0 --out " +
                           (scratch_dir() / "deph.json").string());
  CHECK(deph.exit_code == 0);
  RunResult reanalyzed = run_cli("analyze " + (scratch_dir() / "deph.json").string());
  CHECK(reanalyzed.exit_code == 0);
  CHECK(reanalyzed.output.find("corollary1: Achievable") != std::string::npos);

  RunResult heis = run_cli("scenario heisenberg --t 1 --theta0 0.5 --out " +
                           (scratch_dir() / "heis.json").string());
  CHECK(heis.exit_code == 0);  // passes CPTP validation on load
  CHECK(run_cli("analyze " + (scratch_dir() / "heis.json").string()).exit_code == 0);

  CHECK(run_cli("scenario qutrit-decay --theta0 0.7").exit_code == 2);
}

TEST_CASE("cli sweep with auto control restores quadratic growth") {
  if (!cli_path()) return;
  RunResult controlled = run_cli(
      "sweep --scenario heisenberg --theta0 0.5 --alpha 0.2 --control auto "
      "--n-min 20 --n-max 21");
  CHECK(controlled.exit_code == 0);
  std::istringstream lines(controlled.output);
  std::string line;
  std::getline(lines, line);
  double q20 = 0, q21 = 0, dummy;
  long n;
  std::getline(lines, line);
  std::sscanf(line.c_str(), "%ld,%lg,%lg,%lg", &n, &q20, &dummy, &dummy);
  std::getline(lines, line);
  std::sscanf(line.c_str(), "%ld,%lg,%lg,%lg", &n, &q21, &dummy, &dummy);
  // Quadratic scaling: qfi(21)/qfi(20) close to (21/20)^2.
  CHECK(q21 / q20 == doctest::Approx(21.0 * 21.0 / 400.0).epsilon(0.05));
}
