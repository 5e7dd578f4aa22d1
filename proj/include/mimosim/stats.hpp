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

#ifndef mimosim_stats_H
#define mimosim_stats_H

#include <utility>
#include <vector>

namespace mimosim
{
    // Empirical distribution with linearly interpolated quantiles
    class empirical_cdf
    {
    public:
        explicit empirical_cdf(std::vector<double> samples);

        // value below which fraction q of the mass lies; q in [0, 1]
        double quantile(double q) const;
        double median() const { return quantile(0.5); }
        double cell_edge() const { return quantile(0.05); } // 5th percentile

        // (value, cumulative fraction) points; non-decreasing, ends at 1
        std::vector<std::pair<double, double>> points() const;

        const std::vector<double>& sorted() const { return sorted_; }

    private:
        std::vector<double> sorted_;
    };

} // namespace mimosim

#endif
