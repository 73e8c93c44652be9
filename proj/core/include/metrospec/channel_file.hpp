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
#include <utility>
#include <vector>

#include "metrospec/channels.hpp"
#include "metrospec/types.hpp"

namespace metrospec {

/// On-disk channel description. Exactly one representation is present:
/// a Kraus list, a transition matrix, or a sampled family of
/// (theta, transition matrix) pairs. Complex numbers are encoded as
/// [re, im] pairs and matrices as row-major nested arrays.
struct ChannelFile {
  int dim = 0;
  double theta0 = 0.0;
  std::optional<double> fd_step;

  std::vector<CMatrix> kraus;                       // representation 1
  std::optional<CMatrix> transition;                // representation 2
  std::vector<std::pair<double, CMatrix>> samples;  // representation 3

  std::optional<CMatrix> transition_dot;  // analytic-derivative sidecar
  std::vector<CMatrix> kraus_dots;        // optional, enables HNKS
};

/// Parses and validates a channel file. Throws FileFormatError for
/// malformed content and InvalidChannel when the loaded channel fails the
/// CPTP checks (including Choi positivity).
ChannelFile load_channel_file(const std::string& path);
ChannelFile parse_channel_file(const std::string& text);

std::string serialize_channel_file(const ChannelFile& file);
void save_channel_file(const ChannelFile& file, const std::string& path);

/// Builds the parametrized family the file describes. Sampled families need
/// at least two samples bracketing theta0 unless an analytic derivative
/// sidecar is present.
ParamChannel channel_from_file(const ChannelFile& file);

}  // namespace metrospec
