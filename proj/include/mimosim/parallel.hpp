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

#ifndef mimosim_parallel_H
#define mimosim_parallel_H

#include <cstddef>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mimosim
{
    // Work below this size is not worth a thread team
    constexpr std::size_t parallel_grain = 1024;

    // Runs fn(i) for i in [0, n). Iterations must be independent; results must
    // be written to per-index slots so output does not depend on scheduling.
    template <typename F>
    void parallel_for(std::size_t n, F&& fn, bool serial = false)
    {
#ifdef _OPENMP
        if (!serial && n > 1)
        {
            const std::int64_t sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
            for (std::int64_t i = 0; i < sn; ++i)
                fn(static_cast<std::size_t>(i));
            return;
        }
#else
        (void)serial;
#endif
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
    }

    inline double wall_time()
    {
#ifdef _OPENMP
        return omp_get_wtime();
#else
        return 0.0;
#endif
    }

} // namespace mimosim

#endif
