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
// CSI quantization and reconstruction:
//  - low-resolution grid-of-beams quantizer (beam group + co-phase)
//  - frequency-compressed high-resolution reports (spatial beams x delay taps,
//    strongest-coefficient selection), per layer
//  - multi-TRP joint reports with per-TRP or common frequency bases
//  - time-domain (Doppler) extension of the same structure
//  - power-ratio sparsity metric used to compare basis designs

#ifndef mimosim_codebook_H
#define mimosim_codebook_H

#include <string>
#include <vector>

#include "mimosim/channel.hpp"

namespace mimosim
{
    enum class quantizer : int { none = 0, amp8_psk16 = 1 };

    struct report_coeff
    {
        arma::uword row = 0; // index into the selected spatial columns
        arma::uword col = 0; // index into the selected frequency (x time) columns
        cx value = 0.0;
    };

    // One compressed sub-report: a (TRP, layer) pair
    struct report_block
    {
        arma::uword trp = 0;
        arma::uword layer = 0;
        arma::uvec spatial_cols; // ascending indices into the spatial basis
        arma::uvec freq_cols;    // ascending indices into the frequency basis
        arma::uvec time_cols;    // ascending indices into the time basis (empty unless slots > 1)
        std::vector<report_coeff> coeffs;
        double scale = 1.0; // strongest-coefficient amplitude when quantized

        arma::cx_mat dense_coeff_matrix() const; // spatial x (freq * time)
    };

    struct precoder_report
    {
        arma::uword ports = 0;
        arma::uword freq_units = 0;
        arma::uword layers = 1;
        arma::uword slots = 1;     // > 1 only for Doppler-domain reports
        arma::uword group_size = 0; // > 0 only for grid-of-beams reports
        quantizer quant = quantizer::none;
        std::vector<report_block> blocks;
    };

    bool reports_equal(const precoder_report& a, const precoder_report& b);

    // Line-oriented text form; one coefficient per line: trp row col re im.
    // Round-trips exactly (17 significant digits).
    std::string serialize_report(const precoder_report& report);
    precoder_report parse_report(const std::string& text);

    // Applies the configured quantizer to every block, normalizing amplitudes
    // to the strongest coefficient (8 log-amplitude levels of -1.5 dB, 16-PSK
    // phase). Idempotent: quantizing a quantized report reproduces it.
    precoder_report quantize_report(const precoder_report& report, quantizer q);

    // ---------------------------------------------------------------- Type I

    struct type1_config
    {
        array_config array;
        arma::uword beams_in_group = 1; // 1 or 4
        arma::uword oversampling = 4;   // per spatial dimension
        arma::uword cophase_levels = 4;

        void validate() const;
        arma::uword beam_count() const; // oversampled grid size per polarization
    };

    struct type1_result
    {
        precoder_report report;
        arma::cx_vec beamformer; // unit norm
        double metric = 0.0;     // achieved ||H^H w||
    };

    // Selects the beam group and per-polarization co-phase maximizing
    // ||H^H w|| by exhaustive search over the configured codebook.
    type1_result type1_quantize(const channel_snapshot& snapshot, const type1_config& cfg);

    arma::cx_vec type1_reconstruct(const precoder_report& report, const type1_config& cfg);

    // --------------------------------------------------- frequency compression

    struct etype2_config
    {
        arma::uword beams_L = 2;     // spatial beams per polarization
        arma::uword freq_units_F = 1;
        arma::uword delay_dim_Z = 1; // retained frequency-basis vectors
        double fraction_p = 0.0;     // when > 0, Z is derived from p
        arma::uword units_per_subframe = 1;
        arma::uword top_K = 1;
        arma::uword layers = 1;

        static arma::uword derive_z(double p, arma::uword F, arma::uword phi);
        arma::uword effective_z() const; // Z, derived from fraction_p when set
        void validate_dims(const array_config& array) const;
        void validate(const array_config& array) const;
    };

    // Per-layer compression of [w^(0) ... w^(F-1)]: shared spatial beam
    // selection across layers, per-layer frequency (delay) basis rows,
    // strongest top_K coefficients per layer.
    precoder_report etype2_compress(const std::vector<arma::cx_mat>& layer_precoders,
                                    const etype2_config& cfg, const array_config& array);

    // Beamformer columns (one per layer) at frequency unit x
    arma::cx_mat etype2_reconstruct(const precoder_report& report, const etype2_config& cfg,
                                    const array_config& array, arma::uword x);

    // Full ports x F reconstruction of one layer
    arma::cx_mat etype2_reconstruct_full(const precoder_report& report, const etype2_config& cfg,
                                         const array_config& array, arma::uword layer);

    // ------------------------------------------------------------- multi-TRP

    struct cjt_config
    {
        arma::uword trp_count = 1;
        array_config per_trp_array;
        std::vector<arma::uword> per_trp_beams;  // L_n
        std::vector<arma::uword> per_trp_freq;   // M_n
        std::vector<arma::uword> per_trp_topk;   // K_n
        bool joint_frequency_basis = false;      // common frequency columns for all TRPs

        void validate() const;
    };

    // H_stacked is (N * P) x N_f with TRP n in rows [n*P, (n+1)*P). Projection
    // is per TRP onto the given bases; in joint mode the common frequency
    // columns come from the first TRP's frequency basis and maximize the
    // projected power summed over TRPs.
    precoder_report cjt_compress(const arma::cx_mat& h_stacked, const cjt_config& cfg,
                                 const std::vector<basis_pair>& bases);

    arma::cx_mat cjt_reconstruct(const precoder_report& report, const cjt_config& cfg,
                                 const std::vector<basis_pair>& bases);

    // ------------------------------------------------------------ power ratio

    // Fraction of projected energy captured by the K strongest coefficients of
    // C = S^H H F. Throws "undefined ratio" for a zero-energy channel.
    double power_ratio(const channel_snapshot& snapshot, const basis_pair& basis, arma::uword k);

    // -------------------------------------------------------- Doppler domain

    struct doppler_config
    {
        arma::uword slots = 1;      // N_slot
        arma::uword time_basis = 1; // T retained time-basis vectors
        etype2_config etype2;       // beams_L, freq_units_F, delay_dim_Z (=M), top_K

        void validate(const array_config& array) const;
    };

    // predicted is ports x (N_f * N_slot) with column f * N_slot + s holding
    // frequency unit f at slot s. Keeps the K strongest space-frequency-time
    // coefficients over the selected 2L x (M * T) grid.
    precoder_report doppler_compress(const arma::cx_mat& predicted, const doppler_config& cfg,
                                     const array_config& array);

    arma::cx_mat doppler_reconstruct(const precoder_report& report, const doppler_config& cfg,
                                     const array_config& array);

} // namespace mimosim

#endif
