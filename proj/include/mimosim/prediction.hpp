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
// Mobility enhancement pipeline: project a burst of channel snapshots onto an
// angle-delay basis, fit one complex exponential per dominant pair, predict
// future slots from the fitted Doppler phasors, and compress the prediction
// with the time-domain codebook.

#ifndef mimosim_prediction_H
#define mimosim_prediction_H

#include <vector>

#include "mimosim/channel.hpp"
#include "mimosim/codebook.hpp"

namespace mimosim
{
    struct prediction_config
    {
        arma::uword snapshots_N = 8;    // observed snapshots
        double slot_gap_dt = 1e-3;      // seconds between snapshots
        arma::uword future_M = 4;       // predicted slots
        arma::uword pairs_K = 16;       // tracked angle-delay pairs
        arma::uword doppler_oversampling = 8;

        void validate() const;
        double nyquist_hz() const { return 0.5 / slot_gap_dt; }
    };

    // One tracked angle-delay pair with its fitted complex amplitude (taken at
    // the last observed slot) and Doppler frequency.
    struct doppler_track
    {
        arma::uword angle_index = 0;
        arma::uword delay_index = 0;
        cx amplitude = 0.0;
        double doppler_hz = 0.0;
    };

    // C = S^H H F; exact unitary projection
    arma::cx_mat angle_delay_project(const channel_snapshot& snapshot, const basis_pair& basis);

    // Rejects path sets that alias at the configured slot gap
    void check_doppler_support(const std::vector<path_cluster>& paths, double slot_gap_dt);

    // Picks the pairs_K strongest pairs of the time-averaged coefficient power
    // and fits Doppler by the peak of an oversampled DFT across the snapshot
    // burst; amplitude is the matched-filter projection at the peak.
    std::vector<doppler_track> extract_doppler(const std::vector<channel_snapshot>& snapshots,
                                               const prediction_config& cfg, const basis_pair& basis);

    // Snapshot at t seconds after the last observed slot:
    //   H(t) = S (sum_i amp_i * exp(j*2*pi*v_i*t) E_i) F^H
    channel_snapshot predict_at(const std::vector<doppler_track>& tracks, const basis_pair& basis,
                                double t);

    // The future_M slots at multiples of slot_gap_dt after the last snapshot
    std::vector<channel_snapshot> predict(const std::vector<doppler_track>& tracks,
                                          const prediction_config& cfg, const basis_pair& basis);

    // extract -> predict -> Doppler-domain compression of the stacked result
    precoder_report predict_and_compress(const std::vector<channel_snapshot>& snapshots,
                                         const prediction_config& cfg, const doppler_config& codebook,
                                         const array_config& array, const basis_pair& basis);

    // Column-stacks predicted slots as ports x (N_f * M) with column
    // f * M + s holding unit f of slot s (the Doppler codebook layout)
    arma::cx_mat stack_slots(const std::vector<channel_snapshot>& slots);

} // namespace mimosim

#endif
