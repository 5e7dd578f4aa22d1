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
// Beam tracking under mobility with fast (DCI-style) and slow (MAC-CE-style)
// indication signaling: an event loop issues a beam change whenever the ideal
// beam departs from the applied one; indications fail with the configured
// error rate and are retried after one latency period until they succeed.

#ifndef mimosim_beam_sim_H
#define mimosim_beam_sim_H

#include <string>
#include <vector>

#include <armadillo>

#include "mimosim/rng.hpp"
#include "mimosim/stats.hpp"

namespace mimosim
{
    struct trajectory
    {
        arma::mat waypoints;        // k x 2 polyline, meters
        double speed_mps = 33.3;
        double sample_spacing_m = 1.0;
        arma::uword sample_count = 100;

        void validate() const;
        double sample_interval_s() const { return sample_spacing_m / speed_mps; }
        arma::rowvec position_at(double distance_m) const;
        double total_length() const;
    };

    struct beam_grid
    {
        arma::rowvec trp_position;  // 1 x 2, meters
        arma::vec beam_centers;     // radians
        double beamwidth = 0.1;     // 3 dB width, radians
        double peak_gain_db = 20.0;

        void validate() const;
        // Gaussian main lobe with a -20 dB sidelobe floor
        double gain_db(arma::uword beam, const arma::rowvec& point) const;
    };

    // Evenly spaced beams covering [angle_lo, angle_hi] with adjacent beams
    // crossing at their 3 dB width
    beam_grid make_sector_grid(double x, double y, double angle_lo, double angle_hi,
                               arma::uword beam_count, double peak_gain_db = 20.0);

    enum class indication_mechanism : int { dci = 0, mac_ce = 1 };

    struct indication_model
    {
        indication_mechanism mechanism = indication_mechanism::dci;
        double latency_s = 0.5e-3;
        double bler = 0.01;
        double application_delay_s = 0.0;

        void validate() const;
        static indication_model dci_preset() { return {indication_mechanism::dci, 0.5e-3, 0.01, 0.0}; }
        static indication_model mac_ce_preset()
        {
            return {indication_mechanism::mac_ce, 3e-3, 0.10, 0.0};
        }
    };

    // A non-serving site radiating toward its own (fixed) user; its gain
    // toward the tracked UE shows up as interference.
    struct interferer_site
    {
        beam_grid grid;
        arma::rowvec target; // 1 x 2, the point its serving beam aims at
    };

    struct beam_sim_config
    {
        std::vector<beam_grid> grids; // the serving union; best over all beams
        std::vector<interferer_site> interferers;
        trajectory traj;
        indication_model model;
        double tx_power_dbm = 23.0;
        double noise_dbm = -60.0;
        double pathloss_ref_db = 61.0; // at 1 m
        double pathloss_exponent = 2.1;
        double substep_s = 0.5e-3;     // event-loop resolution

        void validate() const;
    };

    // Preset scenarios: "duh" (single roadside site drive-by) and "hst"
    // (three sites along the track). Geometry values are documented defaults.
    beam_sim_config make_preset(const std::string& name);

    struct beam_sample
    {
        arma::uword sample_index = 0;
        double position_m = 0.0;  // distance along the trajectory
        arma::uword serving_beam = 0; // global index across the grid union
        arma::uword ideal_beam = 0;
        double sinr_db = 0.0;
        double se = 0.0;
    };

    // Global beam index maximizing the gain toward the point, ties to the
    // lowest index.
    arma::uword best_beam(const std::vector<beam_grid>& grids, const arma::rowvec& point);

    // Deterministic for a fixed (config, seed): retransmission counts are drawn
    // per indication event from seed-derived streams, so runs that differ only
    // in latency or error rate share their randomness.
    std::vector<beam_sample> simulate(const beam_sim_config& config, std::uint64_t seed);

    double mean_se(const std::vector<beam_sample>& samples);

} // namespace mimosim

#endif
