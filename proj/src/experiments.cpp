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

#include "mimosim/experiments.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mimosim/beam_sim.hpp"
#include "mimosim/cjt_eval.hpp"
#include "mimosim/codebook.hpp"
#include "mimosim/parallel.hpp"
#include "mimosim/prediction.hpp"
#include "mimosim/srs.hpp"

namespace mimosim
{
    namespace
    {
        std::string fmt17(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return buf;
        }

        std::string csv_quote(const std::string& field)
        {
            if (field.find_first_of(",\"\n") == std::string::npos)
                return field;
            std::string out = "\"";
            for (char c : field)
            {
                if (c == '"')
                    out += '"';
                out += c;
            }
            out += '"';
            return out;
        }

        using row_block = std::vector<std::vector<double>>;

        // ------------------------------------------------- schema definitions

        const std::set<std::string> common_keys = {"experiment", "seed", "drops"};

        const std::map<std::string, std::set<std::string>> experiment_keys = {
            {"power-ratio",
             {"array.ports_v", "array.ports_h", "array.polarizations", "grid.units",
              "ensemble.paths_min", "ensemble.paths_max", "ensemble.sector_deg",
              "ensemble.zenith_deg", "k.step", "k.max"}},
            {"srs-mse",
             {"srs.length", "srs.transmissions", "srs.snr_db", "srs.inr_db", "srs.taps",
              "srs.interferer_taps", "srs.threshold", "srs.max_taps", "srs.cs_grid_levels",
              "srs.doppler_hz", "srs.slot_s"}},
            {"cjt-sinr",
             {"drop.trp_count", "drop.ue_count", "drop.ue_antennas", "drop.array_v",
              "drop.array_h", "drop.array_pol", "drop.units", "drop.spacing_m", "drop.radius_m",
              "drop.noise_power", "drop.exponent", "drop.shadowing_db", "drop.region1_gap_db",
              "feedback"}},
            {"predict",
             {"predict.snapshots", "predict.dt_s", "predict.future", "predict.pairs",
              "predict.oversampling", "array.ports_h", "grid.units", "ensemble.doppler_hz",
              "ensemble.paths_min", "ensemble.paths_max"}},
            {"beam-sim",
             {"beam.preset", "beam.mechanism", "beam.latency_ms", "beam.bler",
              "beam.app_delay_ms"}},
            {"upt", {"upt.input"}},
            {"occ",
             {"occ.length", "occ.base_ports", "occ.blocks", "occ.subcarrier_hz",
              "occ.spread_min_s", "occ.spread_max_s", "occ.points"}},
        };

        void check_keys(const experiment_config& config)
        {
            auto it = experiment_keys.find(config.experiment);
            if (it == experiment_keys.end())
                throw config_error("config: unknown experiment `" + config.experiment + "`");
            for (const auto& [key, value] : config.params.values())
            {
                (void)value;
                if (!common_keys.count(key) && !it->second.count(key))
                    throw config_error("config: unknown key `" + key + "`");
            }
        }

        arma::uword positive_u64(const config_map& params, const std::string& key,
                                 arma::uword fallback)
        {
            const arma::uword v = params.get_u64(key, fallback);
            if (v < 1)
                throw config_error("config: key `" + key + "` must be >= 1");
            return v;
        }

        double positive_f64(const config_map& params, const std::string& key, double fallback)
        {
            const double v = params.get_f64(key, fallback);
            if (!(v > 0.0))
                throw config_error("config: key `" + key + "` must be > 0");
            return v;
        }

        // ---------------------------------------------------- power-ratio run

        struct power_ratio_params
        {
            array_config array;
            frequency_grid grid;
            cluster_scenario clusters;
            arma::uword k_step = 10;
            arma::uword k_max = 0;
        };

        power_ratio_params extract_power_ratio(const config_map& params)
        {
            power_ratio_params out;
            out.array.ports_vertical = positive_u64(params, "array.ports_v", 4);
            out.array.ports_horizontal = positive_u64(params, "array.ports_h", 4);
            out.array.polarizations = positive_u64(params, "array.polarizations", 2);
            out.array.validate();
            out.grid.units = positive_u64(params, "grid.units", 13);
            out.clusters.paths_min = positive_u64(params, "ensemble.paths_min", 3);
            out.clusters.paths_max = positive_u64(params, "ensemble.paths_max", 6);
            if (out.clusters.paths_max < out.clusters.paths_min)
                throw config_error("config: key `ensemble.paths_max` must be >= ensemble.paths_min");
            out.clusters.sector_halfwidth =
                positive_f64(params, "ensemble.sector_deg", 60.0) * arma::datum::pi / 180.0;
            out.clusters.zenith_halfwidth =
                positive_f64(params, "ensemble.zenith_deg", 15.0) * arma::datum::pi / 180.0;
            out.k_step = positive_u64(params, "k.step", 10);
            out.k_max = params.get_u64("k.max", 0);
            const arma::uword total = out.array.total_ports() * out.grid.units;
            if (out.k_max > total)
                throw config_error("config: key `k.max` exceeds the coefficient count");
            return out;
        }

        row_block run_power_ratio(const power_ratio_params& p, std::uint64_t seed,
                                  arma::uword drops, bool serial)
        {
            rng geometry_gen(derive_seed(seed, 0xA001));
            const auto geometry = p.clusters.draw(geometry_gen, p.array, p.grid);

            std::vector<channel_snapshot> samples(drops);
            parallel_for(
                drops,
                [&](std::size_t d) {
                    rng gen(derive_seed(seed, d));
                    samples[d] = synthesize_channel(
                        p.clusters.redraw_gains(geometry, gen, p.array), 0.0, p.array, p.grid);
                },
                serial);

            const basis_pair dft = dft_basis(p.array, p.grid.units);
            const basis_pair eig = eigen_basis(samples);
            const arma::uword total = p.array.total_ports() * p.grid.units;
            const arma::uword k_max = p.k_max == 0 ? total : p.k_max;

            std::vector<arma::uword> ks;
            for (arma::uword k = 1; k <= k_max; k += p.k_step)
                ks.push_back(k);
            if (ks.back() != k_max)
                ks.push_back(k_max);

            std::vector<row_block> blocks(drops);
            parallel_for(
                drops,
                [&](std::size_t d) {
                    for (int basis = 0; basis < 2; ++basis)
                        for (arma::uword k : ks)
                        {
                            const double r =
                                power_ratio(samples[d], basis == 0 ? dft : eig, k);
                            blocks[d].push_back({double(d), double(basis), double(k), r});
                        }
                },
                serial);

            row_block rows;
            for (auto& b : blocks)
                rows.insert(rows.end(), b.begin(), b.end());
            return rows;
        }

        // -------------------------------------------------------- srs-mse run

        struct srs_mse_params
        {
            arma::uword length = 139;
            arma::uword transmissions = 64;
            double snr_db = 10.0;
            double inr_db = 10.0;
            arma::uword taps = 3;
            arma::uword interferer_taps = 3;
            double threshold = 3.0;
            arma::uword max_taps = 0;
            arma::uword cs_grid_levels = 0; // 0 = continuous
            double doppler_hz = 0.0;        // 0 = block-static channels
            double slot_s = 1e-3;
        };

        srs_mse_params extract_srs_mse(const config_map& params)
        {
            srs_mse_params out;
            out.length = positive_u64(params, "srs.length", 139);
            out.transmissions = positive_u64(params, "srs.transmissions", 64);
            out.snr_db = params.get_f64("srs.snr_db", 10.0);
            out.inr_db = params.get_f64("srs.inr_db", 10.0);
            out.taps = positive_u64(params, "srs.taps", 3);
            out.interferer_taps = positive_u64(params, "srs.interferer_taps", 3);
            out.threshold = positive_f64(params, "srs.threshold", 3.0);
            out.max_taps = params.get_u64("srs.max_taps", 0);
            out.cs_grid_levels = params.get_u64("srs.cs_grid_levels", 0);
            out.doppler_hz = params.get_f64("srs.doppler_hz", 0.0);
            out.slot_s = positive_f64(params, "srs.slot_s", 1e-3);
            if (out.doppler_hz < 0.0)
                throw config_error("config: key `srs.doppler_hz` must be >= 0");
            if (out.doppler_hz >= 0.5 / out.slot_s)
                throw config_error(
                    "config: key `srs.doppler_hz` is at or above the per-slot Nyquist rate");
            if (out.taps >= out.length / 2 || out.interferer_taps >= out.length / 2)
                throw config_error("config: key `srs.taps` too large for the sequence length");
            gen_sequence(1, out.length); // validates primality
            return out;
        }

        arma::cx_vec taps_to_channel(const std::vector<std::pair<arma::uword, cx>>& taps,
                                     arma::uword m)
        {
            arma::cx_vec d(m, arma::fill::zeros);
            for (const auto& [t, g] : taps)
                d(t) = g;
            return from_delay_domain(d);
        }

        row_block run_srs_mse(const srs_mse_params& p, std::uint64_t seed, arma::uword drops,
                              bool serial)
        {
            std::vector<row_block> blocks(drops);
            parallel_for(
                drops,
                [&](std::size_t d) {
                    rng gen(derive_seed(seed, d));
                    const arma::uword m = p.length;
                    const arma::uword n = p.transmissions;
                    const double snr = std::pow(10.0, p.snr_db / 10.0);
                    const double inr = std::pow(10.0, p.inr_db / 10.0);

                    std::vector<std::pair<arma::uword, cx>> target_taps, interferer_taps;
                    std::set<arma::uword> used;
                    while (target_taps.size() < p.taps)
                    {
                        const arma::uword t = gen.integer(m / 2);
                        if (used.insert(t).second)
                            target_taps.push_back(
                                {t, gen.cx_gaussian(snr / double(p.taps))});
                    }
                    for (arma::uword k = 0; k < p.interferer_taps; ++k)
                        interferer_taps.push_back(
                            {gen.integer(m / 2), gen.cx_gaussian(inr / double(p.interferer_taps))});

                    // optional per-tap Doppler evolution across the burst
                    std::vector<double> target_dop(p.taps, 0.0), interferer_dop(p.interferer_taps, 0.0);
                    if (p.doppler_hz > 0.0)
                    {
                        for (auto& v : target_dop)
                            v = gen.uniform(-p.doppler_hz, p.doppler_hz);
                        for (auto& v : interferer_dop)
                            v = gen.uniform(-p.doppler_hz, p.doppler_hz);
                    }
                    auto channel_at = [&](const std::vector<std::pair<arma::uword, cx>>& taps,
                                          const std::vector<double>& dop, arma::uword slot) {
                        if (p.doppler_hz <= 0.0)
                            return taps_to_channel(taps, m);
                        std::vector<std::pair<arma::uword, cx>> rotated = taps;
                        for (std::size_t k = 0; k < rotated.size(); ++k)
                            rotated[k].second *= std::polar(
                                1.0, 2.0 * arma::datum::pi * dop[k] * double(slot) * p.slot_s);
                        return taps_to_channel(rotated, m);
                    };

                    const srs_sequence base_t = gen_sequence(1, m);
                    const srs_sequence base_i = gen_sequence(2, m);
                    const double fixed_a = gen.uniform(0.0, 6.283185307179586);
                    const double fixed_b = gen.uniform(0.0, 6.283185307179586);

                    for (int hopping = 0; hopping <= 1; ++hopping)
                    {
                        cs_schedule cs_t, cs_i;
                        if (!hopping)
                        {
                            cs_t = cs_schedule::make_fixed(fixed_a, n);
                            cs_i = cs_schedule::make_fixed(fixed_b, n);
                        }
                        else if (p.cs_grid_levels > 0)
                        {
                            cs_t = cs_schedule::make_hopping_grid(n, gen, p.cs_grid_levels);
                            cs_i = cs_schedule::make_hopping_grid(n, gen, p.cs_grid_levels);
                        }
                        else
                        {
                            cs_t = cs_schedule::make_hopping(n, gen);
                            cs_i = cs_schedule::make_hopping(n, gen);
                        }

                        std::vector<srs_observation> observations;
                        std::vector<srs_sequence> seqs;
                        std::vector<arma::cx_vec> delay, truths;
                        for (arma::uword k = 0; k < n; ++k)
                        {
                            const arma::cx_vec h = channel_at(target_taps, target_dop, k);
                            const arma::cx_vec hi =
                                channel_at(interferer_taps, interferer_dop, k);
                            srs_sequence r = apply_cs(base_t, cs_t.values[k]);
                            srs_sequence ri = apply_cs(base_i, cs_i.values[k]);
                            srs_observation obs = receive(h, r, hi, ri, 1.0, gen, k);
                            delay.push_back(to_delay_domain(despread(obs, r)));
                            observations.push_back(std::move(obs));
                            seqs.push_back(std::move(r));
                            if (p.doppler_hz > 0.0 || k == 0)
                                truths.push_back(h);
                        }
                        const delay_profile profile = accumulate_pdp(delay);
                        const arma::uvec taps = select_taps(profile, p.threshold, p.max_taps);
                        const channel_estimate est =
                            estimate_channel(observations, seqs, taps, truths);

                        std::set<arma::uword> got(taps.begin(), taps.end());
                        int errors = 0;
                        for (const auto& [t, g] : target_taps)
                            if (!got.count(t))
                                ++errors;
                        for (auto t : got)
                        {
                            bool truth = false;
                            for (const auto& [tt, g] : target_taps)
                                truth |= tt == t;
                            if (!truth)
                                ++errors;
                        }
                        blocks[d].push_back({double(d), double(hopping), p.inr_db, est.mse,
                                             double(errors)});
                    }
                },
                serial);

            row_block rows;
            for (auto& b : blocks)
                rows.insert(rows.end(), b.begin(), b.end());
            return rows;
        }

        // ------------------------------------------------------- cjt-sinr run

        struct cjt_sinr_params
        {
            drop_params drop;
            feedback_mode feedback = feedback_mode::ideal;
        };

        cjt_sinr_params extract_cjt_sinr(const config_map& params)
        {
            cjt_sinr_params out;
            out.drop.trp_count = positive_u64(params, "drop.trp_count", 2);
            out.drop.ue_count = positive_u64(params, "drop.ue_count", 1);
            out.drop.ue_antennas = positive_u64(params, "drop.ue_antennas", 2);
            out.drop.trp_array.ports_vertical = positive_u64(params, "drop.array_v", 2);
            out.drop.trp_array.ports_horizontal = positive_u64(params, "drop.array_h", 2);
            out.drop.trp_array.polarizations = positive_u64(params, "drop.array_pol", 2);
            out.drop.grid.units = positive_u64(params, "drop.units", 8);
            out.drop.trp_spacing_m = positive_f64(params, "drop.spacing_m", 200.0);
            out.drop.drop_radius_m = positive_f64(params, "drop.radius_m", 150.0);
            if (out.drop.drop_radius_m <= 10.0)
                throw config_error("config: key `drop.radius_m` must exceed 10");
            out.drop.noise_power = params.get_f64("drop.noise_power", 1e-7);
            if (!(out.drop.noise_power > 0.0))
                throw config_error("config: key `drop.noise_power` must be > 0");
            out.drop.pathloss_exponent = positive_f64(params, "drop.exponent", 3.7);
            out.drop.shadowing_sigma_db = params.get_f64("drop.shadowing_db", 4.0);
            if (out.drop.shadowing_sigma_db < 0.0)
                throw config_error("config: key `drop.shadowing_db` must be >= 0");
            out.drop.region1_max_gap_db = params.get_f64("drop.region1_gap_db", 0.0);
            const std::string fb = params.get_string("feedback", "ideal");
            if (fb == "ideal")
                out.feedback = feedback_mode::ideal;
            else if (fb == "type1")
                out.feedback = feedback_mode::type1;
            else if (fb == "etype2")
                out.feedback = feedback_mode::etype2;
            else if (fb == "cjt")
                out.feedback = feedback_mode::cjt_codebook;
            else
                throw config_error("config: key `feedback` must be one of "
                                   "ideal/type1/etype2/cjt, got `" +
                                   fb + "`");
            out.drop.trp_array.validate();
            if ((out.feedback == feedback_mode::etype2 ||
                 out.feedback == feedback_mode::cjt_codebook) &&
                out.drop.trp_array.total_ports() < 4)
                throw config_error(
                    "config: key `drop.array_v/h/pol` gives fewer than 4 ports, too small for "
                    "the compressed feedback modes");
            return out;
        }

        row_block run_cjt_sinr(const cjt_sinr_params& p, std::uint64_t seed, arma::uword drops,
                               bool serial)
        {
            std::vector<row_block> blocks(drops);
            parallel_for(
                drops,
                [&](std::size_t d) {
                    rng gen(derive_seed(seed, d));
                    drop_scenario sc = make_drop_scenario(p.drop, gen);
                    for (int mode = 0; mode <= 1; ++mode)
                    {
                        drop_result res =
                            run_drop(sc, p.feedback,
                                     mode == 0 ? sinr_mode::single_trp : sinr_mode::cjt);
                        for (arma::uword u = 0; u < res.ues.size(); ++u)
                            blocks[d].push_back({double(d), double(u), double(mode),
                                                 double(static_cast<int>(p.feedback)),
                                                 10.0 * std::log10(res.ues[u].sinr_linear),
                                                 res.ues[u].se});
                    }
                },
                serial);

            row_block rows;
            for (auto& b : blocks)
                rows.insert(rows.end(), b.begin(), b.end());
            return rows;
        }

        // -------------------------------------------------------- predict run

        struct predict_params
        {
            prediction_config cfg;
            array_config array;
            frequency_grid grid;
            cluster_scenario clusters;
        };

        predict_params extract_predict(const config_map& params)
        {
            predict_params out;
            out.cfg.snapshots_N = positive_u64(params, "predict.snapshots", 8);
            out.cfg.slot_gap_dt = positive_f64(params, "predict.dt_s", 5e-3);
            out.cfg.future_M = positive_u64(params, "predict.future", 4);
            out.cfg.pairs_K = positive_u64(params, "predict.pairs", 16);
            out.cfg.doppler_oversampling = positive_u64(params, "predict.oversampling", 8);
            out.cfg.validate();
            out.array.ports_horizontal = positive_u64(params, "array.ports_h", 4);
            out.grid.units = positive_u64(params, "grid.units", 8);
            out.clusters.paths_min = positive_u64(params, "ensemble.paths_min", 2);
            out.clusters.paths_max = positive_u64(params, "ensemble.paths_max", 4);
            out.clusters.doppler_max_hz = positive_f64(params, "ensemble.doppler_hz", 10.0);
            if (out.clusters.doppler_max_hz >= out.cfg.nyquist_hz())
                throw config_error(
                    "config: key `ensemble.doppler_hz` is at or above the slot-gap Nyquist rate");
            return out;
        }

        row_block run_predict(const predict_params& p, std::uint64_t seed, arma::uword drops,
                              bool serial)
        {
            const basis_pair basis = dft_basis(p.array, p.grid.units);
            struct slot_errors
            {
                std::vector<double> pred, stale, energy;
            };
            std::vector<slot_errors> per_drop(drops);
            parallel_for(
                drops,
                [&](std::size_t d) {
                    rng gen(derive_seed(seed, d));
                    const auto paths = p.clusters.draw(gen, p.array, p.grid);
                    check_doppler_support(paths, p.cfg.slot_gap_dt);
                    std::vector<channel_snapshot> snaps;
                    for (arma::uword t = 0; t < p.cfg.snapshots_N; ++t)
                        snaps.push_back(synthesize_channel(paths, double(t) * p.cfg.slot_gap_dt,
                                                           p.array, p.grid));
                    const auto tracks = extract_doppler(snaps, p.cfg, basis);
                    const auto pred = predict(tracks, p.cfg, basis);
                    auto& acc = per_drop[d];
                    acc.pred.resize(p.cfg.future_M);
                    acc.stale.resize(p.cfg.future_M);
                    acc.energy.resize(p.cfg.future_M);
                    for (arma::uword m = 1; m <= p.cfg.future_M; ++m)
                    {
                        const channel_snapshot truth = synthesize_channel(
                            paths, double(p.cfg.snapshots_N - 1 + m) * p.cfg.slot_gap_dt, p.array,
                            p.grid);
                        acc.pred[m - 1] =
                            std::pow(arma::norm(pred[m - 1].matrix - truth.matrix, "fro"), 2);
                        acc.stale[m - 1] =
                            std::pow(arma::norm(snaps.back().matrix - truth.matrix, "fro"), 2);
                        acc.energy[m - 1] = std::pow(arma::norm(truth.matrix, "fro"), 2);
                    }
                },
                serial);

            row_block rows;
            for (arma::uword m = 0; m < p.cfg.future_M; ++m)
            {
                double pred = 0.0, stale = 0.0, energy = 0.0;
                for (const auto& acc : per_drop)
                {
                    pred += acc.pred[m];
                    stale += acc.stale[m];
                    energy += acc.energy[m];
                }
                rows.push_back({double(m + 1), pred / energy, stale / energy});
            }
            return rows;
        }

        // ------------------------------------------------------- beam-sim run

        struct beam_params
        {
            beam_sim_config base;
            bool run_dci = true;
            bool run_mac = true;
            double latency_override_s = -1.0;
            double bler_override = -1.0;
            double app_delay_s = 0.0;
        };

        beam_params extract_beam(const config_map& params)
        {
            beam_params out;
            const std::string preset = params.get_string("beam.preset", "duh");
            out.base = make_preset(preset); // throws on unknown preset
            const std::string mech = params.get_string("beam.mechanism", "both");
            if (mech == "dci")
                out.run_mac = false;
            else if (mech == "mac_ce")
                out.run_dci = false;
            else if (mech != "both")
                throw config_error(
                    "config: key `beam.mechanism` must be one of dci/mac_ce/both, got `" + mech +
                    "`");
            const double latency_ms = params.get_f64("beam.latency_ms", -1.0);
            const double bler = params.get_f64("beam.bler", -1.0);
            const double app_ms = params.get_f64("beam.app_delay_ms", 0.0);
            if (bler >= 1.0)
                throw config_error("config: key `beam.bler` must be < 1");
            if (app_ms < 0.0)
                throw config_error("config: key `beam.app_delay_ms` must be >= 0");
            out.app_delay_s = app_ms * 1e-3;
            if (latency_ms >= 0.0)
                out.latency_override_s = latency_ms * 1e-3;
            if (bler >= 0.0)
                out.bler_override = bler;
            return out;
        }

        row_block run_beam(const beam_params& p, std::uint64_t seed, arma::uword drops,
                           bool serial)
        {
            row_block rows;
            std::vector<indication_model> models;
            if (p.run_dci)
                models.push_back(indication_model::dci_preset());
            if (p.run_mac)
                models.push_back(indication_model::mac_ce_preset());
            for (auto& m : models)
            {
                m.application_delay_s = p.app_delay_s;
                if (p.latency_override_s >= 0.0)
                    m.latency_s = p.latency_override_s;
                if (p.bler_override >= 0.0)
                    m.bler = p.bler_override;
            }

            for (const auto& model : models)
            {
                beam_sim_config cfg = p.base;
                cfg.model = model;
                std::vector<std::vector<beam_sample>> runs(drops);
                parallel_for(
                    drops,
                    [&](std::size_t d) { runs[d] = simulate(cfg, derive_seed(seed, d)); },
                    serial);

                const arma::uword samples = cfg.traj.sample_count;
                for (arma::uword m = 0; m < samples; ++m)
                {
                    double sinr = 0.0, se = 0.0;
                    for (const auto& r : runs)
                    {
                        sinr += r[m].sinr_db;
                        se += r[m].se;
                    }
                    rows.push_back({double(m), double(m) * cfg.traj.sample_spacing_m,
                                    double(static_cast<int>(model.mechanism)),
                                    sinr / double(drops), se / double(drops)});
                }
            }
            return rows;
        }

        // ------------------------------------------------------------ upt run

        std::string extract_upt(const config_map& params)
        {
            const std::string path = params.get_string("upt.input", "");
            if (path.empty())
                throw config_error("config: key `upt.input` is required");
            return path;
        }

        row_block run_upt(const std::string& path)
        {
            const auto bursts_raw = read_burst_csv(path);
            std::vector<burst_record> bursts;
            for (const auto& [bits, seconds] : bursts_raw)
                bursts.push_back({bits, seconds});
            const double r = upt(bursts);
            double total_bits = 0.0, total_s = 0.0;
            for (const auto& b : bursts)
            {
                total_bits += b.size_bits;
                total_s += b.duration_s;
            }
            return {{double(bursts.size()), total_bits, total_s, r}};
        }

        // ------------------------------------------------------------ occ run

        struct occ_params
        {
            occ_config cfg;
            arma::uword blocks = 16;
            double subcarrier_hz = 30e3;
            double spread_min_s = 1e-8;
            double spread_max_s = 1e-6;
            arma::uword points = 5;
        };

        occ_params extract_occ(const config_map& params)
        {
            occ_params out;
            out.cfg.occ_length = positive_u64(params, "occ.length", 4);
            out.cfg.base_ports = positive_u64(params, "occ.base_ports", 12);
            out.cfg.validate();
            out.blocks = positive_u64(params, "occ.blocks", 16);
            out.subcarrier_hz = positive_f64(params, "occ.subcarrier_hz", 30e3);
            out.spread_min_s = positive_f64(params, "occ.spread_min_s", 1e-8);
            out.spread_max_s = positive_f64(params, "occ.spread_max_s", 1e-6);
            if (out.spread_max_s <= out.spread_min_s)
                throw config_error("config: key `occ.spread_max_s` must exceed occ.spread_min_s");
            out.points = positive_u64(params, "occ.points", 5);
            return out;
        }

        row_block run_occ(const occ_params& p, std::uint64_t seed, arma::uword drops, bool serial)
        {
            row_block rows;
            for (arma::uword point = 0; point < p.points; ++point)
            {
                const double frac = p.points == 1
                                        ? 0.0
                                        : double(point) / double(p.points - 1);
                const double spread =
                    p.spread_min_s * std::pow(p.spread_max_s / p.spread_min_s, frac);
                std::vector<double> leakage(drops);
                parallel_for(
                    drops,
                    [&](std::size_t d) {
                        rng gen(derive_seed(seed, point * drops + d));
                        leakage[d] =
                            occ_port_estimation(p.cfg, spread, gen, p.blocks, p.subcarrier_hz)
                                .leakage_ratio;
                    },
                    serial);
                double mean = 0.0;
                for (double v : leakage)
                    mean += v;
                rows.push_back({spread, mean / double(drops)});
            }
            return rows;
        }

        arma::uword default_drops(const std::string& experiment)
        {
            if (experiment == "power-ratio")
                return 100;
            if (experiment == "srs-mse")
                return 200;
            if (experiment == "cjt-sinr")
                return 50;
            if (experiment == "predict")
                return 200;
            if (experiment == "beam-sim")
                return 50;
            if (experiment == "occ")
                return 40;
            return 1;
        }
    } // namespace

    std::vector<std::pair<double, double>> read_burst_csv(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open burst file: " + path);
        std::vector<std::pair<double, double>> out;
        std::string line;
        while (std::getline(in, line))
        {
            if (line.empty() || line.front() == '#')
                continue;
            std::istringstream ls(line);
            std::string a, b;
            if (!std::getline(ls, a, ',') || !std::getline(ls, b))
                throw std::runtime_error("bad burst line in " + path + ": " + line);
            try
            {
                out.emplace_back(std::stod(a), std::stod(b));
            }
            catch (const std::exception&)
            {
                // header line
                if (out.empty())
                    continue;
                throw std::runtime_error("bad burst line in " + path + ": " + line);
            }
        }
        return out;
    }

    void validate_experiment_config(const experiment_config& config)
    {
        check_keys(config);
        if (config.experiment == "power-ratio")
            extract_power_ratio(config.params);
        else if (config.experiment == "srs-mse")
            extract_srs_mse(config.params);
        else if (config.experiment == "cjt-sinr")
            extract_cjt_sinr(config.params);
        else if (config.experiment == "predict")
            extract_predict(config.params);
        else if (config.experiment == "beam-sim")
            extract_beam(config.params);
        else if (config.experiment == "upt")
            extract_upt(config.params);
        else if (config.experiment == "occ")
            extract_occ(config.params);
    }

    experiment_config parse_experiment_config(const std::string& text)
    {
        const config_map map = config_map::parse(text);
        experiment_config config;
        config.experiment = map.get_string("experiment", "");
        if (config.experiment.empty())
            throw config_error("config: key `experiment` is required");
        config.seed = map.get_u64("seed", 1);
        config.drops_set = map.has("drops");
        config.drops = map.get_u64("drops", 0);
        config.params = map;
        validate_experiment_config(config);
        return config;
    }

    std::string result_table::to_csv() const
    {
        std::ostringstream os;
        os << "# tool: " << tool_version << '\n';
        os << "# experiment: " << experiment << '\n';
        os << "# seed: " << seed << '\n';
        char hash_buf[20];
        std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                      static_cast<unsigned long long>(config_hash));
        os << "# config_hash: " << hash_buf << '\n';
        for (std::size_t i = 0; i < header.size(); ++i)
            os << (i ? "," : "") << csv_quote(header[i]);
        os << '\n';
        for (const auto& row : rows)
        {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << fmt17(row[i]);
            os << '\n';
        }
        return os.str();
    }

    result_table run(const experiment_config& config, bool serial)
    {
        validate_experiment_config(config);
        const arma::uword drops =
            config.drops_set ? config.drops : default_drops(config.experiment);

        result_table table;
        table.experiment = config.experiment;
        table.seed = config.seed;
        table.config_hash = config.params.hash();

        if (config.experiment == "power-ratio")
            table.header = {"drop", "basis", "k", "r"};
        else if (config.experiment == "srs-mse")
            table.header = {"drop", "hopping", "inr_db", "mse", "tap_err_count"};
        else if (config.experiment == "cjt-sinr")
            table.header = {"drop", "ue", "mode", "feedback", "sinr_db", "se"};
        else if (config.experiment == "predict")
            table.header = {"slot", "nmse_predicted", "nmse_stale"};
        else if (config.experiment == "beam-sim")
            table.header = {"sample_index", "position_m", "mechanism", "sinr_db", "se"};
        else if (config.experiment == "upt")
            table.header = {"bursts", "total_bits", "total_duration_s", "upt_bits_per_s"};
        else if (config.experiment == "occ")
            table.header = {"delay_spread_s", "mean_leakage"};
        else
            throw config_error("config: unknown experiment `" + config.experiment + "`");

        if (drops == 0)
            return table; // header-only table, nothing runs

        if (config.experiment == "power-ratio")
            table.rows =
                run_power_ratio(extract_power_ratio(config.params), config.seed, drops, serial);
        else if (config.experiment == "srs-mse")
            table.rows = run_srs_mse(extract_srs_mse(config.params), config.seed, drops, serial);
        else if (config.experiment == "cjt-sinr")
            table.rows = run_cjt_sinr(extract_cjt_sinr(config.params), config.seed, drops, serial);
        else if (config.experiment == "predict")
            table.rows = run_predict(extract_predict(config.params), config.seed, drops, serial);
        else if (config.experiment == "beam-sim")
            table.rows = run_beam(extract_beam(config.params), config.seed, drops, serial);
        else if (config.experiment == "upt")
            table.rows = run_upt(extract_upt(config.params));
        else if (config.experiment == "occ")
            table.rows = run_occ(extract_occ(config.params), config.seed, drops, serial);

        return table;
    }

} // namespace mimosim
