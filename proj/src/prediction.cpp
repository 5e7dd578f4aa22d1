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

#include "mimosim/prediction.hpp"

#include <stdexcept>

namespace mimosim
{
    constexpr double two_pi = 6.283185307179586476925287;

    void prediction_config::validate() const
    {
        if (snapshots_N < 2)
            throw std::invalid_argument("prediction_config: snapshots_N must be >= 2");
        if (future_M < 1)
            throw std::invalid_argument("prediction_config: future_M must be >= 1");
        if (!(slot_gap_dt > 0.0))
            throw std::invalid_argument("prediction_config: slot_gap_dt must be > 0");
        if (pairs_K < 1)
            throw std::invalid_argument("prediction_config: pairs_K must be >= 1");
        if (doppler_oversampling < 1)
            throw std::invalid_argument("prediction_config: doppler_oversampling must be >= 1");
    }

    void check_doppler_support(const std::vector<path_cluster>& paths, double slot_gap_dt)
    {
        const double nyquist = 0.5 / slot_gap_dt;
        for (const auto& p : paths)
            if (std::abs(p.doppler_hz) >= nyquist)
                throw std::invalid_argument(
                    "check_doppler_support: Doppler at or above the slot-gap Nyquist rate");
    }

    arma::cx_mat angle_delay_project(const channel_snapshot& snapshot, const basis_pair& basis)
    {
        if (snapshot.matrix.n_rows != basis.spatial.n_rows ||
            snapshot.matrix.n_cols != basis.frequency.n_rows)
            throw std::invalid_argument("angle_delay_project: dimension mismatch");
        return basis.spatial.t() * snapshot.matrix * basis.frequency;
    }

    std::vector<doppler_track> extract_doppler(const std::vector<channel_snapshot>& snapshots,
                                               const prediction_config& cfg, const basis_pair& basis)
    {
        cfg.validate();
        if (snapshots.size() != cfg.snapshots_N)
            throw std::invalid_argument("extract_doppler: snapshot count does not match config");
        const arma::uword n = cfg.snapshots_N;
        const arma::uword p = basis.spatial.n_cols;
        const arma::uword f = basis.frequency.n_cols;

        // per-pair time series of projected coefficients
        arma::cx_cube series(p, f, n);
        arma::mat mean_power(p, f, arma::fill::zeros);
        for (arma::uword t = 0; t < n; ++t)
        {
            arma::cx_mat c = angle_delay_project(snapshots[t], basis);
            series.slice(t) = c;
            mean_power += arma::square(arma::abs(c));
        }

        // strongest pairs, ties to the lowest (angle, delay) index
        struct pair_entry
        {
            arma::uword a, d;
            double power;
        };
        std::vector<pair_entry> entries;
        entries.reserve(p * f);
        for (arma::uword a = 0; a < p; ++a)
            for (arma::uword d = 0; d < f; ++d)
                entries.push_back({a, d, mean_power(a, d)});
        std::stable_sort(entries.begin(), entries.end(),
                         [](const pair_entry& x, const pair_entry& y) { return x.power > y.power; });

        const arma::uword grid = cfg.doppler_oversampling * n;
        const double bin_hz = 1.0 / (static_cast<double>(grid) * cfg.slot_gap_dt);

        std::vector<doppler_track> tracks;
        for (const auto& e : entries)
        {
            if (tracks.size() >= cfg.pairs_K)
                break;
            if (e.power <= 0.0)
                break; // fewer nonzero pairs than requested
            arma::cx_vec z(n);
            for (arma::uword t = 0; t < n; ++t)
                z(t) = series(e.a, e.d, t);

            // oversampled DFT peak over [-nyquist, nyquist)
            double best = -1.0;
            long best_bin = 0;
            const long half = static_cast<long>(grid) / 2;
            for (long k = -half; k < half; ++k)
            {
                cx acc = 0.0;
                for (arma::uword t = 0; t < n; ++t)
                    acc += z(t) * std::polar(1.0, -two_pi * static_cast<double>(k) *
                                                      static_cast<double>(t) /
                                                      static_cast<double>(grid));
                const double mag = std::norm(acc);
                if (mag > best)
                {
                    best = mag;
                    best_bin = k;
                }
            }
            const double doppler = static_cast<double>(best_bin) * bin_hz;

            // matched-filter amplitude at the first slot, then re-referenced to
            // the last observed slot so prediction times start at zero there
            cx amp = 0.0;
            for (arma::uword t = 0; t < n; ++t)
                amp += z(t) * std::polar(1.0, -two_pi * doppler * static_cast<double>(t) *
                                                  cfg.slot_gap_dt);
            amp /= static_cast<double>(n);
            amp *= std::polar(1.0, two_pi * doppler * static_cast<double>(n - 1) * cfg.slot_gap_dt);

            tracks.push_back({e.a, e.d, amp, doppler});
        }
        return tracks;
    }

    channel_snapshot predict_at(const std::vector<doppler_track>& tracks, const basis_pair& basis,
                                double t)
    {
        if (tracks.empty())
            throw std::invalid_argument("predict_at: no tracks");
        arma::cx_mat c(basis.spatial.n_cols, basis.frequency.n_cols, arma::fill::zeros);
        for (const auto& tr : tracks)
            c(tr.angle_index, tr.delay_index) +=
                tr.amplitude * std::polar(1.0, two_pi * tr.doppler_hz * t);
        channel_snapshot snap;
        snap.time_s = t;
        snap.matrix = basis.spatial * c * basis.frequency.t();
        return snap;
    }

    std::vector<channel_snapshot> predict(const std::vector<doppler_track>& tracks,
                                          const prediction_config& cfg, const basis_pair& basis)
    {
        cfg.validate();
        std::vector<channel_snapshot> out;
        out.reserve(cfg.future_M);
        for (arma::uword m = 1; m <= cfg.future_M; ++m)
            out.push_back(predict_at(tracks, basis, static_cast<double>(m) * cfg.slot_gap_dt));
        return out;
    }

    arma::cx_mat stack_slots(const std::vector<channel_snapshot>& slots)
    {
        if (slots.empty())
            throw std::invalid_argument("stack_slots: no slots");
        const arma::uword p = slots.front().matrix.n_rows;
        const arma::uword f = slots.front().matrix.n_cols;
        const arma::uword s = slots.size();
        arma::cx_mat wide(p, f * s);
        for (arma::uword unit = 0; unit < f; ++unit)
            for (arma::uword slot = 0; slot < s; ++slot)
                wide.col(unit * s + slot) = slots[slot].matrix.col(unit);
        return wide;
    }

    precoder_report predict_and_compress(const std::vector<channel_snapshot>& snapshots,
                                         const prediction_config& cfg, const doppler_config& codebook,
                                         const array_config& array, const basis_pair& basis)
    {
        if (codebook.slots != cfg.future_M)
            throw std::invalid_argument(
                "predict_and_compress: codebook slots must equal the prediction horizon");
        const auto tracks = extract_doppler(snapshots, cfg, basis);
        const auto slots = predict(tracks, cfg, basis);
        return doppler_compress(stack_slots(slots), codebook, array);
    }

} // namespace mimosim
