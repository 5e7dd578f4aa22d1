// SPDX-License-Identifier: Apache-2.0
//
// mimosim - massive MIMO link and signaling simulation library
// Copyright (C) 2026 The mimosim authors
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
//
// Experiment front end: validated configurations, deterministic seeded runs
// fanned out over Monte-Carlo drops, CSV result tables.

#ifndef mimosim_experiments_H
#define mimosim_experiments_H

#include <string>
#include <vector>

#include "mimosim/config.hpp"

namespace mimosim
{
    inline constexpr const char* tool_version = "mimosim 0.1.0";

    struct experiment_config
    {
        std::string experiment; // power-ratio, srs-mse, cjt-sinr, predict, beam-sim, upt, occ
        std::uint64_t seed = 1;
        std::uint64_t drops = 0;  // honored when drops_set; otherwise per-experiment default
        bool drops_set = false;   // an explicit `drops = 0` yields a header-only table
        config_map params;
    };

    // Parses and fully validates: unknown keys, type mismatches and invariant
    // violations are config errors naming the key. Nothing runs on failure.
    experiment_config parse_experiment_config(const std::string& text);

    // Re-validates an in-memory config (exercised by the CLI overrides)
    void validate_experiment_config(const experiment_config& config);

    struct result_table
    {
        std::vector<std::string> header;
        std::vector<std::vector<double>> rows;
        std::string experiment;
        std::uint64_t seed = 0;
        std::uint64_t config_hash = 0;

        // `#`-prefixed metadata lines, RFC-4180 quoting, 17 significant digits
        std::string to_csv() const;
    };

    // Deterministic for fixed (config, seed); drops run in parallel and merge
    // in drop order. serial=true forces single-threaded execution (used by the
    // benchmark tool).
    result_table run(const experiment_config& config, bool serial = false);

    // Reads burst records {size_bits, duration_s} for the upt experiment
    std::vector<std::pair<double, double>> read_burst_csv(const std::string& path);

} // namespace mimosim

#endif
