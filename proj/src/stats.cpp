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

#include "mimosim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mimosim
{
    empirical_cdf::empirical_cdf(std::vector<double> samples) : sorted_(std::move(samples))
    {
        if (sorted_.empty())
            throw std::invalid_argument("empirical_cdf: no samples");
        std::sort(sorted_.begin(), sorted_.end());
    }

    double empirical_cdf::quantile(double q) const
    {
        if (q < 0.0 || q > 1.0)
            throw std::invalid_argument("empirical_cdf: quantile outside [0, 1]");
        const double pos = q * static_cast<double>(sorted_.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        if (lo + 1 >= sorted_.size())
            return sorted_.back();
        const double frac = pos - static_cast<double>(lo);
        return sorted_[lo] * (1.0 - frac) + sorted_[lo + 1] * frac;
    }

    std::vector<std::pair<double, double>> empirical_cdf::points() const
    {
        std::vector<std::pair<double, double>> out;
        out.reserve(sorted_.size());
        const double n = static_cast<double>(sorted_.size());
        for (std::size_t i = 0; i < sorted_.size(); ++i)
            out.emplace_back(sorted_[i], static_cast<double>(i + 1) / n);
        return out;
    }

} // namespace mimosim
