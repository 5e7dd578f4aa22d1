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

#include "mimosim/cjt_eval.hpp"

#include <set>
#include <stdexcept>

namespace mimosim
{
    constexpr double two_pi = 6.283185307179586476925287;

    double upt(const std::vector<burst_record>& bursts)
    {
        if (bursts.empty())
            throw std::invalid_argument("upt: no bursts");
        double bits = 0.0, seconds = 0.0;
        for (const auto& b : bursts)
        {
            if (!(b.size_bits > 0.0) || !(b.duration_s > 0.0))
                throw std::invalid_argument("upt: burst sizes and durations must be > 0");
            bits += b.size_bits;
            seconds += b.duration_s;
        }
        return bits / seconds;
    }

    arma::uvec coordination_set(const arma::vec& rsrp_dbm, double threshold_db)
    {
        if (rsrp_dbm.n_elem == 0)
            throw std::invalid_argument("coordination_set: no TRPs");
        const double serving = rsrp_dbm.max(); // index_max ties resolve lowest
        std::vector<arma::uword> set;
        for (arma::uword n = 0; n < rsrp_dbm.n_elem; ++n)
            if (serving - rsrp_dbm(n) <= threshold_db)
                set.push_back(n);
        return arma::uvec(set);
    }

    int rsrp_region(double gap_db)
    {
        if (gap_db < 0.0)
            throw std::invalid_argument("rsrp_region: gap must be >= 0");
        if (gap_db < 3.0)
            return 1;
        if (gap_db < 10.0)
            return 2;
        if (gap_db < 15.0)
            return 3;
        return 4;
    }

    arma::vec sinr(const sinr_scenario& scenario)
    {
        const std::size_t users = scenario.channels.size();
        if (users == 0 || scenario.precoders.size() != users)
            throw std::invalid_argument("sinr: channel/precoder count mismatch");
        if (!(scenario.noise_power > 0.0))
            throw std::invalid_argument("sinr: noise power must be > 0");
        arma::vec out(users);
        for (std::size_t u = 0; u < users; ++u)
        {
            const arma::cx_mat& h = scenario.channels[u];
            if (scenario.precoders[u].n_rows != h.n_cols)
                throw std::invalid_argument("sinr: precoder rows do not match channel columns");
            const double signal = std::pow(arma::norm(h * scenario.precoders[u], "fro"), 2);
            double interference = 0.0;
            for (std::size_t v = 0; v < users; ++v)
                if (v != u)
                    interference += std::pow(arma::norm(h * scenario.precoders[v], "fro"), 2);
            out(u) = signal / (interference + scenario.noise_power);
        }
        return out;
    }

    double se_from_sinr(double sinr_linear)
    {
        return std::min(std::log2(1.0 + sinr_linear), 7.4);
    }

    ul_precoder_result ul_precoder_weighted_csirs(const arma::cx_mat& h)
    {
        if (h.n_rows < 1 || h.n_cols < h.n_rows)
            throw std::invalid_argument("ul_precoder_weighted_csirs: need n_Tx >= n_Rx >= 1");
        if (arma::norm(h, "fro") <= 0.0)
            throw std::invalid_argument("ul_precoder_weighted_csirs: zero channel");
        arma::cx_mat u, v;
        arma::vec s;
        if (!arma::svd(u, s, v, h))
            throw std::runtime_error("ul_precoder_weighted_csirs: SVD failed");
        ul_precoder_result out;
        out.w_dl = v.col(0);
        out.p_ul = h * out.w_dl;
        out.gain = std::pow(arma::norm(out.p_ul), 2);
        out.p_ul_normalized = out.p_ul / arma::norm(out.p_ul);
        return out;
    }

    // ------------------------------------------------------- DMRS extension

    void occ_config::validate() const
    {
        if (occ_length != 2 && occ_length != 4)
            throw std::invalid_argument("occ_config: occ_length must be 2 or 4");
        if (base_ports < 2 || base_ports % 2 != 0)
            throw std::invalid_argument("occ_config: base_ports must be a positive even count");
        if (total_ports() > 24)
            throw std::invalid_argument("occ_config: more than 24 ports");
    }

    arma::cx_vec occ_code(arma::uword occ_length, arma::uword code_index)
    {
        if (occ_length != 2 && occ_length != 4)
            throw std::invalid_argument("occ_code: length must be 2 or 4");
        if (code_index >= occ_length)
            throw std::invalid_argument("occ_code: index out of range");
        // exact fourth roots of unity so orthogonality holds bit-exactly
        static const cx roots4[4] = {cx(1, 0), cx(0, -1), cx(-1, 0), cx(0, 1)};
        arma::cx_vec c(occ_length);
        for (arma::uword i = 0; i < occ_length; ++i)
        {
            const arma::uword step = occ_length == 2 ? (code_index * i * 2) % 4
                                                     : (code_index * i) % 4;
            c(i) = roots4[step];
        }
        return c;
    }

    occ_result occ_port_estimation(const occ_config& cfg,
                                   const std::vector<arma::cx_vec>& per_port_channels)
    {
        cfg.validate();
        const arma::uword total = cfg.total_ports();
        if (per_port_channels.size() != total)
            throw std::invalid_argument("occ_port_estimation: one channel per port required");
        const arma::uword groups = cfg.groups();
        const arma::uword occ = cfg.occ_length;
        const arma::uword sc_count = per_port_channels.front().n_elem;
        if (sc_count % (groups * occ) != 0)
            throw std::invalid_argument("occ_port_estimation: band not divisible into blocks");
        for (const auto& h : per_port_channels)
            if (h.n_elem != sc_count)
                throw std::invalid_argument("occ_port_estimation: inconsistent channel lengths");
        const arma::uword blocks = sc_count / (groups * occ);

        // group g owns the comb subcarriers (b * occ + i) * groups + g
        auto subcarrier = [&](arma::uword g, arma::uword b, arma::uword i) {
            return (b * occ + i) * groups + g;
        };

        std::vector<arma::cx_vec> codes;
        for (arma::uword u = 0; u < occ; ++u)
            codes.push_back(occ_code(occ, u));

        occ_result out;
        out.estimates.set_size(total, blocks);
        out.leakage.zeros(total, total);

        for (arma::uword g = 0; g < groups; ++g)
            for (arma::uword b = 0; b < blocks; ++b)
            {
                // joint reception across the group's ports
                arma::cx_vec y(occ, arma::fill::zeros);
                for (arma::uword u = 0; u < occ; ++u)
                    for (arma::uword i = 0; i < occ; ++i)
                        y(i) += codes[u](i) * per_port_channels[g * occ + u](subcarrier(g, b, i));
                for (arma::uword p = 0; p < occ; ++p)
                {
                    cx acc = 0.0;
                    for (arma::uword i = 0; i < occ; ++i)
                        acc += y(i) * std::conj(codes[p](i));
                    out.estimates(g * occ + p, b) = acc / static_cast<double>(occ);
                }

                // single-active-port responses give the leakage matrix;
                // opposite chips are summed pairwise so that flat channels
                // cancel exactly
                for (arma::uword q = 0; q < occ; ++q)
                    for (arma::uword p = 0; p < occ; ++p)
                    {
                        cx acc = 0.0;
                        for (arma::uword i = 0; i < occ / 2; ++i)
                        {
                            const arma::uword j = i + occ / 2;
                            const cx a = codes[q](i) *
                                         per_port_channels[g * occ + q](subcarrier(g, b, i)) *
                                         std::conj(codes[p](i));
                            const cx c = codes[q](j) *
                                         per_port_channels[g * occ + q](subcarrier(g, b, j)) *
                                         std::conj(codes[p](j));
                            acc += a + c;
                        }
                        out.leakage(g * occ + p, g * occ + q) +=
                            std::norm(acc / static_cast<double>(occ));
                    }
            }

        double diag = 0.0, offdiag = 0.0;
        for (arma::uword p = 0; p < total; ++p)
            for (arma::uword q = 0; q < total; ++q)
                (p == q ? diag : offdiag) += out.leakage(p, q);
        out.leakage_ratio = diag + offdiag > 0.0 ? offdiag / (diag + offdiag) : 0.0;
        return out;
    }

    occ_result occ_port_estimation(const occ_config& cfg, double delay_spread_s, rng& gen,
                                   arma::uword blocks, double subcarrier_hz)
    {
        cfg.validate();
        const arma::uword sc_count = cfg.groups() * cfg.occ_length * blocks;
        std::vector<arma::cx_vec> channels;
        channels.reserve(cfg.total_ports());
        const arma::uword taps = 8;
        for (arma::uword p = 0; p < cfg.total_ports(); ++p)
        {
            // exponential power-delay profile with the requested RMS spread
            arma::cx_vec h(sc_count, arma::fill::zeros);
            if (delay_spread_s <= 0.0)
            {
                h.fill(gen.cx_gaussian());
            }
            else
            {
                double power_sum = 0.0;
                std::vector<std::pair<double, cx>> tap_list;
                for (arma::uword k = 0; k < taps; ++k)
                {
                    const double delay = -delay_spread_s * std::log(1.0 - gen.uniform());
                    const double power = std::exp(-delay / delay_spread_s);
                    tap_list.push_back({delay, gen.cx_gaussian(power)});
                    power_sum += power;
                }
                for (auto& [delay, gain] : tap_list)
                {
                    gain /= std::sqrt(power_sum);
                    for (arma::uword sc = 0; sc < sc_count; ++sc)
                        h(sc) += gain * std::polar(1.0, -two_pi * subcarrier_hz *
                                                            static_cast<double>(sc) * delay);
                }
            }
            channels.push_back(h);
        }
        return occ_port_estimation(cfg, channels);
    }

    // ------------------------------------------------------------ drop runs

    drop_scenario make_drop_scenario(const drop_params& params_in, rng& gen)
    {
        drop_params params = params_in;
        if (params.trp_array.total_ports() == 1 && params.trp_array.polarizations == 1)
        {
            params.trp_array.ports_vertical = 2;
            params.trp_array.ports_horizontal = 2;
            params.trp_array.polarizations = 2;
        }
        if (params.grid.units == 1)
            params.grid.units = 8;
        params.trp_array.validate();
        params.grid.validate();
        if (params.trp_count < 1 || params.ue_count < 1)
            throw std::invalid_argument("make_drop_scenario: need at least one TRP and one UE");
        if (!(params.noise_power > 0.0))
            throw std::invalid_argument("make_drop_scenario: noise power must be > 0");
        if (!(params.drop_radius_m > 10.0))
            throw std::invalid_argument("make_drop_scenario: drop radius must exceed 10 m");

        drop_scenario sc;
        sc.params = params;
        sc.trp_positions.set_size(params.trp_count, 2);
        for (arma::uword t = 0; t < params.trp_count; ++t)
        {
            sc.trp_positions(t, 0) =
                (static_cast<double>(t) - 0.5 * static_cast<double>(params.trp_count - 1)) *
                params.trp_spacing_m;
            sc.trp_positions(t, 1) = 0.0;
        }

        sc.ue_positions.set_size(params.ue_count, 2);
        sc.rsrp_dbm.set_size(params.ue_count, params.trp_count);
        for (arma::uword u = 0; u < params.ue_count; ++u)
        {
            for (int attempt = 0; attempt < 1000; ++attempt)
            {
                const double x = gen.uniform(-params.drop_radius_m, params.drop_radius_m);
                const double y = gen.uniform(10.0, params.drop_radius_m);
                arma::rowvec rsrp(params.trp_count);
                for (arma::uword t = 0; t < params.trp_count; ++t)
                {
                    const double dx = x - sc.trp_positions(t, 0);
                    const double dy = y - sc.trp_positions(t, 1);
                    const double d = std::max(1.0, std::sqrt(dx * dx + dy * dy));
                    const double pl = params.pathloss_ref_db +
                                      10.0 * params.pathloss_exponent * std::log10(d) +
                                      params.shadowing_sigma_db * gen.gaussian();
                    rsrp(t) = params.tx_power_dbm - pl;
                }
                sc.ue_positions(u, 0) = x;
                sc.ue_positions(u, 1) = y;
                sc.rsrp_dbm.row(u) = rsrp;
                if (params.region1_max_gap_db <= 0.0 || params.trp_count < 2)
                    break;
                arma::rowvec sorted = arma::sort(rsrp, "descend");
                if (sorted(0) - sorted(1) < params.region1_max_gap_db)
                    break;
            }
        }

        sc.links.resize(params.ue_count);
        for (arma::uword u = 0; u < params.ue_count; ++u)
        {
            sc.links[u].resize(params.trp_count);
            for (arma::uword t = 0; t < params.trp_count; ++t)
            {
                const double amp = std::pow(10.0, sc.rsrp_dbm(u, t) / 20.0);
                for (arma::uword r = 0; r < params.ue_antennas; ++r)
                {
                    auto paths = params.clusters.draw(gen, params.trp_array, params.grid);
                    channel_snapshot snap =
                        synthesize_channel(paths, 0.0, params.trp_array, params.grid);
                    snap.matrix *= amp;
                    sc.links[u][t].push_back(std::move(snap));
                }
            }
        }
        return sc;
    }

    namespace
    {
        // BS-side channel reconstruction from the configured feedback. The
        // per-TRP block of the stacked row channel is compressed and rebuilt
        // independently, mirroring per-TRP reporting.
        arma::cx_mat reconstruct_block(const arma::cx_mat& h, const array_config& array,
                                       feedback_mode feedback)
        {
            const arma::uword nf = h.n_cols;
            switch (feedback)
            {
            case feedback_mode::ideal:
                return h;
            case feedback_mode::type1:
            {
                type1_config cfg;
                cfg.array = array;
                cfg.oversampling = 4;
                type1_result res = type1_quantize({h, 0.0}, cfg);
                // codeword direction with the true per-unit projection
                return res.beamformer * (res.beamformer.t() * h);
            }
            case feedback_mode::etype2:
            case feedback_mode::cjt_codebook:
            {
                etype2_config cfg;
                cfg.beams_L = 2;
                cfg.freq_units_F = nf;
                cfg.delay_dim_Z = (nf + 1) / 2;
                cfg.top_K = std::max<arma::uword>(4, cfg.beams_L * cfg.delay_dim_Z);
                precoder_report rep = etype2_compress({h}, cfg, array);
                return etype2_reconstruct_full(rep, cfg, array, 0);
            }
            }
            throw std::logic_error("reconstruct_block: unknown feedback mode");
        }
    } // namespace

    drop_result run_drop(const drop_scenario& scenario, feedback_mode feedback, sinr_mode mode,
                         int serving_trp)
    {
        const drop_params& params = scenario.params;
        const arma::uword p = params.trp_array.total_ports();
        const arma::uword nf = params.grid.units;
        const arma::uword users = params.ue_count;
        const arma::uword rx = params.ue_antennas;

        std::vector<arma::uword> active; // transmitting TRPs, stacked in order
        if (mode == sinr_mode::cjt)
        {
            // union of the per-UE coordination sets
            std::set<arma::uword> joint;
            for (arma::uword u = 0; u < users; ++u)
            {
                const arma::uvec set = coordination_set(scenario.rsrp_dbm.row(u).t(),
                                                        params.coordination_threshold_db);
                joint.insert(set.begin(), set.end());
            }
            active.assign(joint.begin(), joint.end());
        }
        else
        {
            arma::uword trp = serving_trp >= 0 ? static_cast<arma::uword>(serving_trp)
                                               : scenario.rsrp_dbm.row(0).index_max();
            if (trp >= params.trp_count)
                throw std::invalid_argument("run_drop: serving TRP out of range");
            active.push_back(trp);
        }
        const arma::uword width = active.size() * p;

        // true and reconstructed stacked channels, one row block per rx antenna
        const bool joint_report = feedback == feedback_mode::cjt_codebook && active.size() > 1;
        cjt_config joint_cfg;
        std::vector<basis_pair> joint_bases;
        if (joint_report)
        {
            joint_cfg.trp_count = active.size();
            joint_cfg.per_trp_array = params.trp_array;
            joint_cfg.per_trp_beams.assign(active.size(), 2);
            joint_cfg.per_trp_freq.assign(active.size(), (nf + 1) / 2);
            joint_cfg.per_trp_topk.assign(active.size(),
                                          std::max<arma::uword>(4, 2 * ((nf + 1) / 2)));
            joint_cfg.joint_frequency_basis = true;
            joint_bases.assign(active.size(), dft_basis(params.trp_array, nf));
        }

        std::vector<arma::cx_mat> true_h(users), est_h(users);
        for (arma::uword u = 0; u < users; ++u)
        {
            arma::cx_mat truth(rx * width, nf); // rows grouped per rx antenna
            arma::cx_mat est(rx * width, nf);
            for (arma::uword r = 0; r < rx; ++r)
            {
                if (joint_report)
                {
                    arma::cx_mat stacked(width, nf);
                    for (std::size_t s = 0; s < active.size(); ++s)
                        stacked.rows(s * p, (s + 1) * p - 1) =
                            scenario.links[u][active[s]][r].matrix;
                    truth.rows(r * width, (r + 1) * width - 1) = stacked;
                    est.rows(r * width, (r + 1) * width - 1) = cjt_reconstruct(
                        cjt_compress(stacked, joint_cfg, joint_bases), joint_cfg, joint_bases);
                    continue;
                }
                for (std::size_t s = 0; s < active.size(); ++s)
                {
                    const arma::cx_mat& block = scenario.links[u][active[s]][r].matrix;
                    truth.rows(r * width + s * p, r * width + (s + 1) * p - 1) = block;
                    est.rows(r * width + s * p, r * width + (s + 1) * p - 1) =
                        reconstruct_block(block, params.trp_array, feedback);
                }
            }
            true_h[u] = truth;
            est_h[u] = est;
        }

        // per-unit regularized zero-forcing on rank-1 effective rows
        std::vector<arma::cx_mat> precoders(users, arma::cx_mat(width, nf));
        for (arma::uword f = 0; f < nf; ++f)
        {
            arma::cx_mat g(users, width);
            for (arma::uword u = 0; u < users; ++u)
            {
                arma::cx_mat hu(rx, width);
                for (arma::uword r = 0; r < rx; ++r)
                    hu.row(r) = est_h[u].submat(r * width, f, (r + 1) * width - 1, f).st();
                if (rx == 1)
                    g.row(u) = hu.row(0);
                else
                {
                    arma::cx_mat uu, vv;
                    arma::vec ss;
                    if (!arma::svd(uu, ss, vv, hu))
                        throw std::runtime_error("run_drop: SVD failed");
                    g.row(u) = (uu.col(0).t() * hu);
                }
            }
            const arma::cx_mat gram = g * g.t() +
                                      params.noise_power *
                                          arma::cx_mat(arma::eye(users, users),
                                                       arma::mat(users, users, arma::fill::zeros));
            arma::cx_mat praw = g.t() * arma::inv(gram); // width x users
            for (arma::uword u = 0; u < users; ++u)
            {
                arma::cx_vec pu = praw.col(u);
                for (std::size_t s = 0; s < active.size(); ++s)
                {
                    arma::cx_vec block = pu.subvec(s * p, (s + 1) * p - 1);
                    const double norm = arma::norm(block);
                    if (norm > 0.0)
                        pu.subvec(s * p, (s + 1) * p - 1) = block / norm;
                }
                if (mode == sinr_mode::single_trp)
                {
                    const double norm = arma::norm(pu);
                    if (norm > 0.0)
                        pu /= norm;
                }
                precoders[u].col(f) = pu;
            }
        }

        // literal SINR on the true channels, unit by unit
        drop_result result;
        result.ues.resize(users);
        std::vector<burst_record> bursts;
        for (arma::uword u = 0; u < users; ++u)
        {
            double sinr_acc = 0.0, se_acc = 0.0;
            for (arma::uword f = 0; f < nf; ++f)
            {
                arma::cx_mat hu(rx, width);
                for (arma::uword r = 0; r < rx; ++r)
                    hu.row(r) = true_h[u].submat(r * width, f, (r + 1) * width - 1, f).st();
                const double signal = std::pow(arma::norm(hu * precoders[u].col(f), "fro"), 2);
                double interference = 0.0;
                for (arma::uword v = 0; v < users; ++v)
                    if (v != u)
                        interference +=
                            std::pow(arma::norm(hu * precoders[v].col(f), "fro"), 2);
                const double s = signal / (interference + params.noise_power);
                sinr_acc += s;
                se_acc += se_from_sinr(s);
            }
            result.ues[u].sinr_linear = sinr_acc / static_cast<double>(nf);
            result.ues[u].se = se_acc / static_cast<double>(nf);
            bursts.push_back({result.ues[u].se * 20e6 * 0.1, 0.1});
        }
        result.upt_bits_per_s = upt(bursts);

        if (params.trp_count >= 2)
        {
            arma::rowvec sorted = arma::sort(scenario.rsrp_dbm.row(0), "descend");
            result.region = rsrp_region(sorted(0) - sorted(1));
        }
        else
            result.region = 4;
        return result;
    }

} // namespace mimosim
