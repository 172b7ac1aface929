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

#include "rislocus/protocol.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rislocus
{
    struct UeGrid
    {
        double x_min = 1.5, x_max = 3.5;
        double y_min = 5.0, y_max = 7.0;
        std::size_t nx = 5, ny = 5;

        std::vector<Vec3> points(double z) const; // x fastest
    };

    struct TauPolicy
    {
        bool perfect = true;
        double sigma_s = 0.0; // Gaussian ranging error when not perfect
    };

    struct ExperimentConfig
    {
        Scene scene;
        double cb_min_deg = -60.0; // codebook targets in the RIS local frame
        double cb_max_deg = 60.0;
        double cb_step_deg = 2.0;
        std::size_t snapshots = 64;
        std::optional<double> noise_power; // overrides the scene value
        std::uint64_t seed = 1;
        std::optional<double> z; // UE height; defaults to the scene's Rx height
        TauPolicy tau;
        UeGrid grid;
        LocalizeOptions music;
    };

    // {"scene": path | object, "codebook": {"min_deg","max_deg","step_deg"}, "snapshots", "noise_power",
    //  "seed", "z", "tau": {"policy": "perfect"|"gaussian", "sigma_s"}, "ue_grid": {...}}
    ExperimentConfig experiment_from_json(const nlohmann::json &j, const std::string &base_dir = ".");

    // Copy of the scene with the Rx array re-centred at `ue` (orientation kept)
    Scene scene_with_ue(const Scene &base, const Vec3 &ue);

    // Incident direction at the RIS (local frame) from the Tx
    Direction ris_incident(const Scene &scene);

    Codebook experiment_codebook(const ExperimentConfig &cfg, Bits bits);

    struct ErrorStats
    {
        double peak = 0.0;
        double average = 0.0;
        double variance = 0.0;
        double stddev() const;
    };

    ErrorStats error_stats(const std::vector<double> &errors);

    struct StudyRow
    {
        std::string method;
        Bits bits;
        bool music = false;
        ErrorStats stats; // degrees
        std::vector<double> errors_deg;
    };

    // Continuous and 1-bit codebooks, each with sweep only and sweep + MUSIC, over the UE grid
    std::vector<StudyRow> run_localization_study(const ExperimentConfig &cfg);

    struct MappingOutcome
    {
        Vec3 ue = Vec3::Zero();
        bool detected = false;
        Vec3 estimate = Vec3::Zero();
        double error_m = 0.0;
        std::size_t detections = 0;
        std::size_t measurements = 0;
    };

    struct MappingStudy
    {
        std::vector<MappingOutcome> outcomes;
        ErrorStats stats; // metres, over detected outcomes
        std::size_t detected = 0;
    };

    MappingStudy run_mapping_study(const ExperimentConfig &cfg, Bits bits = std::nullopt);

    nlohmann::json to_json(const StudyRow &row);
    std::string study_csv(const std::vector<StudyRow> &rows);
}
