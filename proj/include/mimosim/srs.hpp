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
// Uplink sounding chain: constant-amplitude root sequences, per-transmission
// cyclic shifts (fixed or hopped), interference-corrupted reception,
// delay-domain power profiles, whitening-based tap selection and channel
// estimation, plus antenna-switching / frequency-hopping resource schedules.

#ifndef mimosim_srs_H
#define mimosim_srs_H

#include <armadillo>
#include <vector>

#include "mimosim/rng.hpp"

namespace mimosim
{
    using cx = std::complex<double>;

    struct srs_sequence
    {
        arma::uword root = 1;
        arma::cx_vec values; // unit modulus
    };

    enum class cs_mode { fixed, hopping };

    // Per-transmission cyclic-shift values in [0, 2*pi)
    struct cs_schedule
    {
        std::vector<double> values;
        cs_mode mode = cs_mode::fixed;

        static cs_schedule make_fixed(double alpha, arma::uword transmissions);
        static cs_schedule make_hopping(arma::uword transmissions, rng& gen);
        // 12-level grid variant of hopping, for comparison with the
        // continuous default
        static cs_schedule make_hopping_grid(arma::uword transmissions, rng& gen,
                                             arma::uword levels = 12);
    };

    struct srs_observation
    {
        arma::cx_vec y;
        arma::uword transmission_index = 0;
    };

    struct delay_profile
    {
        arma::vec pdp;                       // per-tap mean power, >= 0
        arma::uword transmissions_accumulated = 0;
        double noise_floor_estimate = 0.0;   // median of pdp
    };

    // Antenna switching / frequency hopping / partial-sounding configuration
    struct srs_resource_map
    {
        arma::uword ports = 4;
        arma::uword symbols = 2;
        arma::uword hop_count = 1;
        arma::uword partial_factor = 1; // UEs sharing each hop bandwidth

        void validate() const;
    };

    struct srs_assignment
    {
        arma::uword transmission = 0; // time index
        arma::uword symbol = 0;
        arma::uword ue = 0;
        arma::uvec ports;            // ports sounded in this symbol
        arma::uword band_start = 0;  // subcarrier range [start, stop)
        arma::uword band_stop = 0;
    };

    // Quadratic-phase constant-amplitude sequence of odd prime length. The
    // cyclic autocorrelation is zero at every nonzero lag and cross
    // correlations between coprime roots have constant magnitude sqrt(M).
    srs_sequence gen_sequence(arma::uword root, arma::uword length);

    // Cyclic extension of a base sequence to a longer allocation
    srs_sequence cyclic_extend(const srs_sequence& seq, arma::uword length);

    // Element m multiplied by exp(j * alpha * m)
    srs_sequence apply_cs(const srs_sequence& seq, double alpha);

    // y(m) = r(m) h(m) + r'(m) h'(m) + w(m), w ~ CN(0, noise_power).
    // The interferer terms may be empty.
    srs_observation receive(const arma::cx_vec& target_channel, const srs_sequence& target_seq,
                            const arma::cx_vec& interferer_channel, const srs_sequence& interferer_seq,
                            double noise_power, rng& gen, arma::uword transmission_index = 0);

    // y(m) * conj(r(m)); recovers h exactly in the clean single-user case
    arma::cx_vec despread(const srs_observation& obs, const srs_sequence& seq_with_cs);

    // IFFT to the delay domain; inverted exactly by an FFT
    arma::cx_vec to_delay_domain(const arma::cx_vec& despread_seq);
    arma::cx_vec from_delay_domain(const arma::cx_vec& delay_seq);

    // Mean per-tap power over the accumulated transmissions
    delay_profile accumulate_pdp(const std::vector<arma::cx_vec>& delay_vectors);

    // Taps with pdp above threshold_factor times the noise-floor estimate,
    // strongest first truncation when max_taps > 0, returned ascending.
    arma::uvec select_taps(const delay_profile& profile, double threshold_factor = 3.0,
                           arma::uword max_taps = 0);

    struct channel_estimate
    {
        arma::cx_vec h_hat; // average over transmissions
        double mse = 0.0;   // sum |h_hat_n - h_n|^2 / sum |h_n|^2
    };

    // Per-transmission estimate: despread, transform, zero outside the
    // selected taps, transform back. truths holds one vector per transmission
    // (or a single vector reused for all of them).
    channel_estimate estimate_channel(const std::vector<srs_observation>& observations,
                                      const std::vector<srs_sequence>& seqs_with_cs,
                                      const arma::uvec& taps,
                                      const std::vector<arma::cx_vec>& truths);

    // Port-to-symbol and hop/partial band assignments over one sounding period
    // (hop_count * partial_factor transmissions); the union of bands covers the
    // whole bandwidth for every UE.
    std::vector<srs_assignment> resource_schedule(const srs_resource_map& cfg,
                                                  arma::uword subcarriers);

} // namespace mimosim

#endif
