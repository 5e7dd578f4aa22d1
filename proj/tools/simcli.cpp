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
// Command-line front end: one subcommand per experiment, seeded and
// reproducible, CSV output with metadata comment lines.
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mimosim/experiments.hpp"

namespace
{
    struct cli_options
    {
        std::string config_path;
        std::string out_path;
        long long seed = -1;
        long long drops = -1;
    };

    int run_experiment(const std::string& name, const cli_options& opts)
    {
        mimosim::experiment_config config;
        try
        {
            if (!opts.config_path.empty())
            {
                std::ifstream in(opts.config_path);
                if (!in)
                {
                    std::cerr << "config error: cannot open " << opts.config_path << "\n";
                    return 1;
                }
                std::stringstream buffer;
                buffer << in.rdbuf();
                mimosim::config_map map = mimosim::config_map::parse(buffer.str());
                const std::string declared = map.get_string("experiment", name);
                if (declared != name)
                {
                    std::cerr << "config error: file declares experiment `" << declared
                              << "` but the `" << name << "` subcommand was invoked\n";
                    return 1;
                }
                map.set("experiment", name);
                config.params = map;
                config.seed = map.get_u64("seed", 1);
                config.drops_set = map.has("drops");
                config.drops = map.get_u64("drops", 0);
            }
            else
                config.params.set("experiment", name);
            config.experiment = name;
            if (opts.seed >= 0)
            {
                config.seed = static_cast<std::uint64_t>(opts.seed);
                config.params.set("seed", std::to_string(opts.seed));
            }
            if (opts.drops >= 0)
            {
                config.drops = static_cast<std::uint64_t>(opts.drops);
                config.drops_set = true;
                config.params.set("drops", std::to_string(opts.drops));
            }
            mimosim::validate_experiment_config(config);
        }
        catch (const mimosim::config_error& e)
        {
            std::cerr << "config error: " << e.what() << "\n";
            return 1;
        }

        try
        {
            const mimosim::result_table table = mimosim::run(config);
            const std::string out = opts.out_path.empty() ? name + ".csv" : opts.out_path;
            std::ofstream os(out, std::ios::binary);
            if (!os)
            {
                std::cerr << "runtime error: cannot write " << out << "\n";
                return 2;
            }
            os << table.to_csv();
            if (!os)
            {
                std::cerr << "runtime error: write failed for " << out << "\n";
                return 2;
            }
            std::cout << out << ": " << table.rows.size() << " rows\n";
            return 0;
        }
        catch (const mimosim::config_error& e)
        {
            std::cerr << "config error: " << e.what() << "\n";
            return 1;
        }
        catch (const std::exception& e)
        {
            std::cerr << "runtime error: " << e.what() << "\n";
            return 2;
        }
    }
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"massive MIMO feature simulations"};
    app.require_subcommand(1);

    const std::vector<std::string> experiments = {"power-ratio", "srs-mse", "cjt-sinr",
                                                  "predict",     "beam-sim", "upt",
                                                  "occ"};
    std::map<std::string, cli_options> options;
    for (const auto& name : experiments)
    {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        auto& opt = options[name];
        sub->add_option("--config", opt.config_path, "configuration file");
        sub->add_option("--seed", opt.seed, "master seed (overrides the config)");
        sub->add_option("--drops", opt.drops, "Monte-Carlo drops (overrides the config)");
        sub->add_option("--out", opt.out_path, "output CSV path");
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& name : experiments)
        if (app.got_subcommand(name))
            return run_experiment(name, options[name]);
    return 1;
}
