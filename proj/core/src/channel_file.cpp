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

#include "metrospec/channel_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "metrospec/errors.hpp"

namespace metrospec {

namespace {

using nlohmann::json;

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex json_to_complex(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw FileFormatError("complex values must be [re, im] pairs");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix json_to_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw FileFormatError("matrix must be a nested array");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols)
      throw FileFormatError("matrix rows have inconsistent lengths");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = json_to_complex(j[i][c]);
  }
  return m;
}

void require_square(const CMatrix& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n)
    throw FileFormatError(std::string(what) + " has the wrong shape");
}

}  // namespace

ChannelFile parse_channel_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FileFormatError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FileFormatError("channel file must be a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw FileFormatError("missing integer field 'dim'");
  if (!j.contains("theta0") || !j["theta0"].is_number())
    throw FileFormatError("missing numeric field 'theta0'");

  ChannelFile file;
  file.dim = j["dim"].get<int>();
  if (file.dim <= 0) throw FileFormatError("'dim' must be positive");
  file.theta0 = j["theta0"].get<double>();
  if (j.contains("fd_step")) file.fd_step = j["fd_step"].get<double>();

  const Eigen::Index d = file.dim;
  const Eigen::Index d2 = d * d;

  int representations = 0;
  if (j.contains("kraus")) {
    ++representations;
    for (const json& k : j["kraus"]) {
      CMatrix m = json_to_matrix(k);
      require_square(m, d, "Kraus operator");
      file.kraus.push_back(std::move(m));
    }
    if (file.kraus.empty()) throw FileFormatError("'kraus' must not be empty");
  }
  if (j.contains("transition")) {
    ++representations;
    CMatrix m = json_to_matrix(j["transition"]);
    require_square(m, d2, "transition matrix");
    file.transition = std::move(m);
  }
  if (j.contains("samples")) {
    ++representations;
    for (const json& s : j["samples"]) {
      if (!s.is_object() || !s.contains("theta") || !s.contains("transition"))
        throw FileFormatError("each sample needs 'theta' and 'transition'");
      CMatrix m = json_to_matrix(s["transition"]);
      require_square(m, d2, "sampled transition matrix");
      file.samples.emplace_back(s["theta"].get<double>(), std::move(m));
    }
    if (file.samples.empty()) throw FileFormatError("'samples' must not be empty");
    std::sort(file.samples.begin(), file.samples.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  if (representations != 1)
    throw FileFormatError(
        "exactly one of 'kraus', 'transition', 'samples' must be present");

  if (j.contains("transition_dot")) {
    CMatrix m = json_to_matrix(j["transition_dot"]);
    require_square(m, d2, "transition_dot");
    file.transition_dot = std::move(m);
  }
  if (j.contains("kraus_dots")) {
    if (file.kraus.empty())
      throw FileFormatError("'kraus_dots' requires the Kraus representation");
    for (const json& k : j["kraus_dots"]) {
      CMatrix m = json_to_matrix(k);
      require_square(m, d, "Kraus derivative");
      file.kraus_dots.push_back(std::move(m));
    }
    if (file.kraus_dots.size() != file.kraus.size())
      throw FileFormatError("'kraus_dots' must match 'kraus' in length");
  }

  // Validate the channel content itself (CPTP including Choi positivity).
  if (!file.kraus.empty()) {
    kraus_to_transition(make_kraus_channel(file.kraus));
  } else if (file.transition) {
    make_transition_matrix(file.dim, *file.transition, /*check_choi=*/true);
  } else {
    for (const auto& [theta, t] : file.samples)
      make_transition_matrix(file.dim, t, /*check_choi=*/true);
  }
  return file;
}

ChannelFile load_channel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileFormatError("cannot open channel file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_channel_file(buffer.str());
}

std::string serialize_channel_file(const ChannelFile& file) {
  json j;
  j["dim"] = file.dim;
  j["theta0"] = file.theta0;
  if (file.fd_step) j["fd_step"] = *file.fd_step;
  if (!file.kraus.empty()) {
    json list = json::array();
    for (const CMatrix& k : file.kraus) list.push_back(matrix_to_json(k));
    j["kraus"] = std::move(list);
  }
  if (file.transition) j["transition"] = matrix_to_json(*file.transition);
  if (!file.samples.empty()) {
    json list = json::array();
    for (const auto& [theta, t] : file.samples) {
      json s;
      s["theta"] = theta;
      s["transition"] = matrix_to_json(t);
      list.push_back(std::move(s));
    }
    j["samples"] = std::move(list);
  }
  if (file.transition_dot) j["transition_dot"] = matrix_to_json(*file.transition_dot);
  if (!file.kraus_dots.empty()) {
    json list = json::array();
    for (const CMatrix& k : file.kraus_dots) list.push_back(matrix_to_json(k));
    j["kraus_dots"] = std::move(list);
  }
  return j.dump(2) + "\n";
}

void save_channel_file(const ChannelFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileFormatError("cannot write channel file: " + path);
  out << serialize_channel_file(file);
}

ParamChannel channel_from_file(const ChannelFile& file) {
  const int d = file.dim;
  ParamChannel pc;
  pc.theta0 = file.theta0;

  if (!file.samples.empty()) {
    auto samples = file.samples;
    pc.at = [samples, d](double theta) {
      const std::pair<double, CMatrix>* best = nullptr;
      for (const auto& s : samples) {
        if (!best || std::abs(s.first - theta) < std::abs(best->first - theta)) best = &s;
      }
      if (std::abs(best->first - theta) > 1e-9)
        throw DomainViolation("sampled family has no sample at the requested parameter");
      return make_transition_matrix(d, best->second);
    };
    if (file.transition_dot) {
      CMatrix dot = *file.transition_dot;
      pc.mode = DerivativeMode::analytic;
      pc.t_dot = [dot](double) { return dot; };
    } else {
      // Difference quotient across the samples bracketing theta0.
      const std::pair<double, CMatrix>* below = nullptr;
      const std::pair<double, CMatrix>* above = nullptr;
      for (const auto& s : samples) {
        if (s.first < file.theta0 - 1e-15 && (!below || s.first > below->first)) below = &s;
        if (s.first > file.theta0 + 1e-15 && (!above || s.first < above->first)) above = &s;
      }
      const std::pair<double, CMatrix>* at0 = nullptr;
      for (const auto& s : samples)
        if (std::abs(s.first - file.theta0) <= 1e-15) at0 = &s;
      CMatrix dot;
      if (below && above) {
        dot = (above->second - below->second) / (above->first - below->first);
      } else if (at0 && above) {
        dot = (above->second - at0->second) / (above->first - at0->first);
      } else if (at0 && below) {
        dot = (at0->second - below->second) / (at0->first - below->first);
      } else {
        throw FileFormatError(
            "sampled family needs at least 2 samples bracketing theta0 (or a "
            "'transition_dot' sidecar)");
      }
      pc.mode = DerivativeMode::analytic;
      pc.t_dot = [dot](double) { return dot; };
    }
    return pc;
  }

  TransitionMatrix t = !file.kraus.empty()
                           ? kraus_to_transition(make_kraus_channel(file.kraus))
                           : make_transition_matrix(d, *file.transition);
  pc.at = [t](double) { return t; };
  pc.mode = DerivativeMode::analytic;
  if (file.transition_dot) {
    CMatrix dot = *file.transition_dot;
    pc.t_dot = [dot](double) { return dot; };
  } else if (!file.kraus_dots.empty()) {
    CMatrix dot = CMatrix::Zero(Eigen::Index(d) * d, Eigen::Index(d) * d);
    for (size_t i = 0; i < file.kraus.size(); ++i) {
      if (!all_finite(file.kraus_dots[i]))
        throw DomainViolation(
            "Kraus derivatives are non-finite; supply 'transition_dot' instead");
      dot += kron(file.kraus_dots[i], file.kraus[i].conjugate()) +
             kron(file.kraus[i], file.kraus_dots[i].conjugate());
    }
    pc.t_dot = [dot](double) { return dot; };
  } else {
    const Eigen::Index n = Eigen::Index(d) * d;
    pc.t_dot = [n](double) { return CMatrix(CMatrix::Zero(n, n)); };
  }
  return pc;
}

}  // namespace metrospec
