// SPDX-License-Identifier: Apache-2.0
//
// rislocus - RIS-aided localization, sensing and testbed emulation
// Copyright (C) 2026 rislocus contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "rislocus/channel.hpp"
#include "rislocus/greedyopt.hpp"
#include "rislocus/pattern.hpp"
#include "rislocus/protocol.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace rislocus::io
{
    using json = nlohmann::json;

    json to_json(const PhaseConfig &config);
    PhaseConfig config_from_json(const json &j);

    json to_json(const Codebook &cb);
    Codebook codebook_from_json(const json &j);

    // Arrays: {"n_h", "n_v", "d_h", "d_v" (m or {"lambda": x}), "position": [x,y,z], "yaw_deg"}
    json to_json(const Scene &scene);
    Scene scene_from_json(const json &j);

    json read_json(const std::string &path);
    void write_text(const std::string &path, const std::string &text);

    // angle_rad, power_linear, power_db_normalized
    std::string spectrum_csv(const Spectrum &s);
    std::string paths_csv(const std::vector<PropagationPath> &paths);
    std::string trace_csv(const OptTrace &trace);

    std::string sha256_hex(const std::string &data);
}
