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
// Multi-TRP drop evaluation: coordination sets, joint vs single-TRP SINR,
// user-perceived throughput, RSRP region taxonomy, uplink precoding indicated
// through weighted reference signals, and cover-code extended DMRS ports.

#ifndef mimosim_cjt_eval_H
#define mimosim_cjt_eval_H

#include <vector>

#include "mimosim/channel.hpp"
#include "mimosim/codebook.hpp"

namespace mimosim
{
    // ------------------------------------------------------------ primitives

    struct burst_record
    {
        double size_bits = 0.0;
        double duration_s = 0.0;
    };

    // Ratio of sums, not the mean of per-burst rates
    double upt(const std::vector<burst_record>& bursts);

    // Serving cell is the strongest RSRP (ties to the lowest index); the set
    // contains every TRP within threshold_db of it, inclusive at the boundary.
    arma::uvec coordination_set(const arma::vec& rsrp_dbm, double threshold_db = 10.0);

    // 1: gap < 3 dB, 2: [3, 10), 3: [10, 15), 4: >= 15
    int rsrp_region(double gap_db);

    enum class sinr_mode { single_trp, cjt };

    // Literal SINR evaluation: per-UE channels (stacked column-wise across
    // TRPs in cjt mode) and per-UE precoder matrices of matching width.
    struct sinr_scenario
    {
        std::vector<arma::cx_mat> channels;  // per UE, n_Rx x n_tx_total
        std::vector<arma::cx_mat> precoders; // per UE, n_tx_total x rank
        double noise_power = 1.0;
        sinr_mode mode = sinr_mode::single_trp;
    };

    // SINR_u = ||H_u P_u||_F^2 / (sum_{v != u} ||H_u P_v||_F^2 + n), linear
    arma::vec sinr(const sinr_scenario& scenario);

    double se_from_sinr(double sinr_linear); // min(log2(1 + sinr), 7.4)

    // ---------------------------------------------------- uplink indication

    struct ul_precoder_result
    {
        arma::cx_vec w_dl;        // unit-norm reference-signal weight
        arma::cx_vec p_ul;        // H * w_dl, the indicated uplink precoder
        arma::cx_vec p_ul_normalized;
        double gain = 0.0;        // ||H w_dl||^2, the dominant singular value squared
    };

    // The weight maximizing ||H W_DL||^2 is the dominant right singular
    // direction; the received reference signal then doubles as the UL precoder.
    ul_precoder_result ul_precoder_weighted_csirs(const arma::cx_mat& h);

    // ------------------------------------------------------- DMRS extension

    struct occ_config
    {
        arma::uword occ_length = 4; // 2 or 4
        arma::uword base_ports = 12;

        arma::uword total_ports() const { return base_ports * occ_length / 2; }
        arma::uword groups() const { return base_ports / 2; }
        void validate() const;
    };

    // Exact +/-1, +/-j cover code of the given length (DFT row)
    arma::cx_vec occ_code(arma::uword occ_length, arma::uword code_index);

    struct occ_result
    {
        arma::cx_mat estimates;    // total_ports x blocks, de-covered estimates
        arma::mat leakage;         // leakage(p, q): energy in port p from port q alone
        double leakage_ratio = 0.0; // off-diagonal energy / total energy
    };

    // Ports within a group share comb resource elements under cover codes over
    // blocks of occ_length elements; frequency selectivity across a block
    // breaks orthogonality and leaks energy between ports of the group.
    occ_result occ_port_estimation(const occ_config& cfg,
                                   const std::vector<arma::cx_vec>& per_port_channels);

    // Convenience overload generating exponential-profile channels with the
    // given RMS delay spread on a standard grid (blocks per group, subcarrier
    // spacing), then estimating them.
    occ_result occ_port_estimation(const occ_config& cfg, double delay_spread_s, rng& gen,
                                   arma::uword blocks = 16, double subcarrier_hz = 30e3);

    // ------------------------------------------------------------ drop runs

    struct drop_params
    {
        arma::uword trp_count = 2;
        arma::uword ue_count = 1;
        arma::uword ue_antennas = 2;
        array_config trp_array;   // defaults set in make_drop_scenario
        frequency_grid grid;
        double trp_spacing_m = 200.0;
        double drop_radius_m = 150.0;  // UEs drop uniformly in this square
        double tx_power_dbm = 46.0;
        double pathloss_ref_db = 32.0; // at 1 m
        double pathloss_exponent = 3.7;
        double shadowing_sigma_db = 4.0;
        double noise_power = 1e-7;     // linear, same units as received power
        double coordination_threshold_db = 10.0;
        cluster_scenario clusters;
        double region1_max_gap_db = 0.0; // > 0: resample UEs until inside region
    };

    struct drop_scenario
    {
        drop_params params;
        arma::mat trp_positions; // trp x 2, meters
        arma::mat ue_positions;  // ue x 2
        arma::mat rsrp_dbm;      // ue x trp
        // per (ue, trp, rx antenna): ports x units channel including pathloss
        std::vector<std::vector<std::vector<channel_snapshot>>> links;
    };

    drop_scenario make_drop_scenario(const drop_params& params, rng& gen);

    enum class feedback_mode { ideal = 0, type1 = 1, etype2 = 2, cjt_codebook = 3 };

    struct ue_outcome
    {
        double sinr_linear = 0.0; // mean over frequency units
        double se = 0.0;          // mean capped spectral efficiency
    };

    struct drop_result
    {
        std::vector<ue_outcome> ues;
        double upt_bits_per_s = 0.0;
        int region = 0; // RSRP region of UE 0 between its two strongest TRPs
    };

    // Full pipeline: RSRP/regions, CSI feedback and reconstruction at the BS,
    // per-unit regularized zero-forcing with per-TRP power normalization, and
    // literal SINR evaluation on the true channels. serving_trp selects the
    // transmit TRP in single-TRP mode (-1 = strongest RSRP of UE 0).
    drop_result run_drop(const drop_scenario& scenario, feedback_mode feedback, sinr_mode mode,
                         int serving_trp = -1);

} // namespace mimosim

#endif
