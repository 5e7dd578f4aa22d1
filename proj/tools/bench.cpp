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
// Compares the OpenMP kernels against their serial references and checks
// that both produce identical results. Usage: mimosim-bench [repeats]

#include <cstdio>
#include <cstring>

#include "mimosim/channel.hpp"
#include "mimosim/experiments.hpp"
#include "mimosim/parallel.hpp"

using namespace mimosim;

namespace
{
    struct timing
    {
        double serial_s = 0.0;
        double parallel_s = 0.0;
        bool identical = false;
    };

    void report(const char* name, const timing& t)
    {
        std::printf("%-28s serial %8.3f ms   parallel %8.3f ms   speedup %.2fx   %s\n", name,
                    1e3 * t.serial_s, 1e3 * t.parallel_s, t.serial_s / t.parallel_s,
                    t.identical ? "results identical" : "RESULTS DIFFER");
    }

    timing bench_synthesis(int repeats)
    {
        array_config arr;
        arr.ports_vertical = 8;
        arr.ports_horizontal = 8;
        arr.polarizations = 2;
        frequency_grid grid;
        grid.units = 256;
        grid.unit_spacing_hz = 5e5;

        rng gen(1234);
        cluster_scenario sc;
        sc.paths_min = 48;
        sc.paths_max = 48;
        sc.doppler_max_hz = 100.0;
        const auto paths = sc.draw(gen, arr, grid);

        timing t;
        channel_snapshot a, b;
        for (int r = 0; r < repeats; ++r)
        {
            double t0 = wall_time();
            a = synthesize_channel_serial(paths, 0.01 * r, arr, grid);
            t.serial_s += wall_time() - t0;
            t0 = wall_time();
            b = synthesize_channel(paths, 0.01 * r, arr, grid);
            t.parallel_s += wall_time() - t0;
        }
        t.identical = std::memcmp(a.matrix.memptr(), b.matrix.memptr(),
                                  a.matrix.n_elem * sizeof(cx)) == 0;
        return t;
    }

    timing bench_experiment(const char* text, int repeats)
    {
        const experiment_config cfg = parse_experiment_config(text);
        timing t;
        std::string serial_csv, parallel_csv;
        for (int r = 0; r < repeats; ++r)
        {
            double t0 = wall_time();
            serial_csv = run(cfg, true).to_csv();
            t.serial_s += wall_time() - t0;
            t0 = wall_time();
            parallel_csv = run(cfg, false).to_csv();
            t.parallel_s += wall_time() - t0;
        }
        t.identical = serial_csv == parallel_csv;
        return t;
    }
} // namespace

int main(int argc, char** argv)
{
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
#ifdef _OPENMP
    std::printf("OpenMP threads: %d, repeats: %d\n", omp_get_max_threads(), repeats);
#else
    std::printf("built without OpenMP, repeats: %d\n", repeats);
#endif

    report("channel synthesis", bench_synthesis(repeats));
    report("power-ratio drops",
           bench_experiment("experiment = power-ratio\nseed = 2\ndrops = 64\n", repeats));
    report("srs-mse drops",
           bench_experiment("experiment = srs-mse\nseed = 2\ndrops = 32\n"
                            "srs.transmissions = 64\n",
                            repeats));
    report("beam-sim seeds",
           bench_experiment("experiment = beam-sim\nseed = 2\ndrops = 32\n", repeats));
    return 0;
}
