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

// Covered tests:
// - Config grammar: comments, validation errors naming the key, duplicates
// - Serialize/parse round trips
// - Experiment validation before execution
// - Seeded determinism of the experiment tables (byte-identical CSV)
// - Experiment rows vs direct library calls on the same derived seeds
// - Parallel and serial drop fan-out produce identical tables

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "mimosim/channel.hpp"
#include "mimosim/codebook.hpp"
#include "mimosim/experiments.hpp"

using namespace mimosim;

TEST_CASE("config grammar")
{
    SECTION("comments, blanks and values parse")
    {
        config_map map = config_map::parse("# comment\n\nexperiment = power-ratio\n"
                                           "grid.units = 13\nk.step= 5\n");
        REQUIRE(map.get_string("experiment", "") == "power-ratio");
        REQUIRE(map.get_u64("grid.units", 0) == 13);
        REQUIRE(map.get_u64("k.step", 0) == 5);
        REQUIRE(map.get_u64("absent", 7) == 7);
    }

    SECTION("errors name the offending content")
    {
        REQUIRE_THROWS_AS(config_map::parse("not a pair\n"), config_error);
        REQUIRE_THROWS_WITH(config_map::parse("a = 1\na = 2\n"),
                            Catch::Matchers::ContainsSubstring("duplicate key `a`"));
        REQUIRE_THROWS_WITH(config_map::parse("BadKey = 1\n"),
                            Catch::Matchers::ContainsSubstring("bad key"));
        config_map map = config_map::parse("x = notanumber\n");
        REQUIRE_THROWS_WITH(map.get_u64("x", 0), Catch::Matchers::ContainsSubstring("`x`"));
    }

    SECTION("serialize/parse round trip is idempotent")
    {
        config_map a = config_map::parse("b.two = 2\na.one = 1\nc.three = x y z\n");
        config_map b = config_map::parse(a.serialize());
        REQUIRE(a.serialize() == b.serialize());
        REQUIRE(a.hash() == b.hash());
    }
}

TEST_CASE("experiment validation")
{
    SECTION("a minimal config gets module defaults")
    {
        experiment_config cfg = parse_experiment_config("experiment = power-ratio\n");
        REQUIRE(cfg.experiment == "power-ratio");
        REQUIRE(cfg.seed == 1);
        REQUIRE_FALSE(cfg.drops_set);
    }

    SECTION("unknown keys are rejected by name")
    {
        REQUIRE_THROWS_WITH(
            parse_experiment_config("experiment = power-ratio\ngrid.unitz = 13\n"),
            Catch::Matchers::ContainsSubstring("grid.unitz"));
    }

    SECTION("negative noise power is rejected by name")
    {
        REQUIRE_THROWS_WITH(
            parse_experiment_config("experiment = cjt-sinr\ndrop.noise_power = -1\n"),
            Catch::Matchers::ContainsSubstring("noise_power"));
    }

    SECTION("aliasing Doppler configurations are rejected")
    {
        REQUIRE_THROWS_AS(parse_experiment_config("experiment = predict\n"
                                                  "predict.dt_s = 0.005\n"
                                                  "ensemble.doppler_hz = 100\n"),
                          config_error);
    }

    SECTION("nothing runs on an invalid config")
    {
        experiment_config cfg;
        cfg.experiment = "power-ratio";
        cfg.params.set("experiment", "power-ratio");
        cfg.params.set("k.max", "100000");
        REQUIRE_THROWS_AS(run(cfg), config_error);
    }
}

TEST_CASE("experiment determinism and equivalence")
{
    SECTION("identical config and seed give byte-identical CSV")
    {
        for (const std::string text :
             {std::string("experiment = power-ratio\nseed = 9\ndrops = 5\n"
                          "array.ports_v = 2\narray.ports_h = 2\ngrid.units = 6\nk.step = 7\n"),
              std::string("experiment = srs-mse\nseed = 3\ndrops = 4\nsrs.length = 53\n"
                          "srs.transmissions = 16\n"),
              std::string("experiment = cjt-sinr\nseed = 4\ndrops = 3\ndrop.units = 4\n"),
              std::string("experiment = predict\nseed = 5\ndrops = 6\n"),
              std::string("experiment = beam-sim\nseed = 6\ndrops = 3\n"),
              std::string("experiment = occ\nseed = 7\ndrops = 4\nocc.blocks = 8\n")})
        {
            experiment_config cfg = parse_experiment_config(text);
            REQUIRE(run(cfg).to_csv() == run(cfg).to_csv());
        }
    }

    SECTION("upt determinism through a file")
    {
        const std::string path = "upt_test_bursts.csv";
        {
            std::ofstream os(path);
            os << "size_bits,duration_s\n1000000,1.0\n3000000,1.0\n";
        }
        experiment_config cfg = parse_experiment_config("experiment = upt\nupt.input = " + path +
                                                        "\n");
        result_table a = run(cfg);
        REQUIRE(a.to_csv() == run(cfg).to_csv());
        REQUIRE(a.rows.size() == 1);
        REQUIRE(a.rows[0][3] == Catch::Approx(2e6).margin(1e-6));
    }

    SECTION("explicit zero drops yield a header-only table")
    {
        experiment_config cfg = parse_experiment_config("experiment = power-ratio\ndrops = 0\n");
        result_table table = run(cfg);
        REQUIRE(table.rows.empty());
        REQUIRE(table.header.size() == 4);
        REQUIRE(table.to_csv().find("drop,basis,k,r\n") != std::string::npos);
    }

    SECTION("parallel and serial fan-out produce identical tables")
    {
        experiment_config cfg = parse_experiment_config(
            "experiment = power-ratio\nseed = 11\ndrops = 8\n"
            "array.ports_v = 2\narray.ports_h = 4\ngrid.units = 8\nk.step = 13\n");
        REQUIRE(run(cfg, false).to_csv() == run(cfg, true).to_csv());
    }

    SECTION("the binary reports config and runtime errors through exit codes")
    {
        // ctest runs from build/tests; skip when the binary is elsewhere
        if (std::ifstream("../tools/mimosim").good())
        {
            REQUIRE(std::system("../tools/mimosim power-ratio --drops 2 "
                                "--out cli_ok.csv > /dev/null 2>&1") == 0);
            {
                std::ofstream os("cli_bad.cfg");
                os << "experiment = power-ratio\nbogus.key = 1\n";
            }
            int status = std::system("../tools/mimosim power-ratio --config cli_bad.cfg "
                                     "--out cli_bad.csv > /dev/null 2>&1");
            REQUIRE(WEXITSTATUS(status) == 1);
            {
                std::ofstream os("cli_upt.cfg");
                os << "experiment = upt\nupt.input = no_such_file.csv\n";
            }
            status = std::system("../tools/mimosim upt --config cli_upt.cfg "
                                 "--out cli_upt.csv > /dev/null 2>&1");
            REQUIRE(WEXITSTATUS(status) == 2);
        }
    }

    SECTION("power-ratio rows match direct library calls on the same seeds")
    {
        const std::uint64_t seed = 21;
        experiment_config cfg = parse_experiment_config(
            "experiment = power-ratio\nseed = 21\ndrops = 6\n"
            "array.ports_v = 2\narray.ports_h = 2\narray.polarizations = 2\n"
            "grid.units = 6\nk.step = 11\n");
        result_table table = run(cfg);

        array_config arr;
        arr.ports_vertical = 2;
        arr.ports_horizontal = 2;
        arr.polarizations = 2;
        frequency_grid grid;
        grid.units = 6;
        cluster_scenario clusters;
        clusters.paths_min = 3;
        clusters.paths_max = 6;

        rng geometry_gen(derive_seed(seed, 0xA001));
        const auto geometry = clusters.draw(geometry_gen, arr, grid);
        std::vector<channel_snapshot> samples;
        for (std::uint64_t d = 0; d < 6; ++d)
        {
            rng gen(derive_seed(seed, d));
            samples.push_back(
                synthesize_channel(clusters.redraw_gains(geometry, gen, arr), 0.0, arr, grid));
        }
        basis_pair dft = dft_basis(arr, 6);
        basis_pair eig = eigen_basis(samples);

        for (const auto& row : table.rows)
        {
            const auto drop = static_cast<std::size_t>(row[0]);
            const int basis = static_cast<int>(row[1]);
            const auto k = static_cast<arma::uword>(row[2]);
            const double expect = power_ratio(samples[drop], basis == 0 ? dft : eig, k);
            REQUIRE(row[3] == expect); // bit-identical, same code path and seeds
        }
    }
}
