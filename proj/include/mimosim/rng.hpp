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

#ifndef mimosim_rng_H
#define mimosim_rng_H

#include <complex>
#include <cstdint>
#include <random>

namespace mimosim
{
    // SplitMix64 finalizer. Used for seed derivation so that per-drop streams
    // are reproducible from (master seed, drop index) alone:
    //   drop_seed = splitmix64(master ^ splitmix64(index + 0x9E3779B97F4A7C15))
    inline std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ULL;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBULL;
        x ^= x >> 31;
        return x;
    }

    inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
    {
        return splitmix64(master ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
    }

    // Seeded generator with explicit Gaussian sampling (Box-Muller) so that
    // streams do not depend on the standard library's distribution internals.
    class rng
    {
    public:
        explicit rng(std::uint64_t seed) : engine(seed) {}

        // Uniform in [0, 1)
        double uniform()
        {
            // 53 random mantissa bits
            return static_cast<double>(engine() >> 11) * 0x1.0p-53;
        }

        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        std::uint64_t integer(std::uint64_t n) // uniform in [0, n)
        {
            return engine() % n;
        }

        double gaussian()
        {
            if (have_spare)
            {
                have_spare = false;
                return spare;
            }
            double u1 = uniform(), u2 = uniform();
            while (u1 <= 0.0)
                u1 = uniform();
            double mag = std::sqrt(-2.0 * std::log(u1));
            spare = mag * std::sin(6.283185307179586476925287 * u2);
            have_spare = true;
            return mag * std::cos(6.283185307179586476925287 * u2);
        }

        // Circularly-symmetric complex Gaussian with E|z|^2 = variance
        std::complex<double> cx_gaussian(double variance = 1.0)
        {
            double s = std::sqrt(0.5 * variance);
            return {s * gaussian(), s * gaussian()};
        }

        std::mt19937_64& raw() { return engine; }

    private:
        std::mt19937_64 engine;
        double spare = 0.0;
        bool have_spare = false;
    };

} // namespace mimosim

#endif
