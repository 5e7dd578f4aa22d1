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

#include "mimosim/beam_sim.hpp"

#include <cmath>
#include <stdexcept>

namespace mimosim
{
    void trajectory::validate() const
    {
        if (waypoints.n_rows < 2 || waypoints.n_cols != 2)
            throw std::invalid_argument("trajectory: need a k x 2 polyline with k >= 2");
        if (!(speed_mps > 0.0) || !(sample_spacing_m > 0.0) || sample_count < 1)
            throw std::invalid_argument("trajectory: speed, spacing and count must be positive");
        const double needed = sample_spacing_m * static_cast<double>(sample_count - 1);
        if (needed > total_length() + 1e-9)
            throw std::invalid_argument("trajectory: polyline shorter than the sampled path");
    }

    double trajectory::total_length() const
    {
        double len = 0.0;
        for (arma::uword k = 1; k < waypoints.n_rows; ++k)
            len += arma::norm(waypoints.row(k) - waypoints.row(k - 1));
        return len;
    }

    arma::rowvec trajectory::position_at(double distance_m) const
    {
        double remaining = std::max(0.0, distance_m);
        for (arma::uword k = 1; k < waypoints.n_rows; ++k)
        {
            const arma::rowvec a = waypoints.row(k - 1);
            const arma::rowvec b = waypoints.row(k);
            const double seg = arma::norm(b - a);
            if (remaining <= seg || k + 1 == waypoints.n_rows)
                return a + (seg > 0.0 ? remaining / seg : 0.0) * (b - a);
            remaining -= seg;
        }
        return waypoints.row(waypoints.n_rows - 1);
    }

    void beam_grid::validate() const
    {
        if (trp_position.n_elem != 2)
            throw std::invalid_argument("beam_grid: position must be 2D");
        if (beam_centers.n_elem < 1)
            throw std::invalid_argument("beam_grid: need at least one beam");
        if (!(beamwidth > 0.0))
            throw std::invalid_argument("beam_grid: beamwidth must be > 0");
    }

    double beam_grid::gain_db(arma::uword beam, const arma::rowvec& point) const
    {
        const double angle =
            std::atan2(point(1) - trp_position(1), point(0) - trp_position(0));
        double delta = angle - beam_centers(beam);
        while (delta > arma::datum::pi)
            delta -= 2.0 * arma::datum::pi;
        while (delta < -arma::datum::pi)
            delta += 2.0 * arma::datum::pi;
        const double rolloff = 3.0 * std::pow(2.0 * delta / beamwidth, 2);
        return peak_gain_db - std::min(rolloff, 20.0);
    }

    beam_grid make_sector_grid(double x, double y, double angle_lo, double angle_hi,
                               arma::uword beam_count, double peak_gain_db)
    {
        if (beam_count < 1 || !(angle_hi > angle_lo))
            throw std::invalid_argument("make_sector_grid: bad sector");
        beam_grid g;
        g.trp_position = arma::rowvec{x, y};
        g.beam_centers = arma::linspace(angle_lo, angle_hi, beam_count);
        g.beamwidth = (angle_hi - angle_lo) / static_cast<double>(std::max<arma::uword>(beam_count - 1, 1));
        g.peak_gain_db = peak_gain_db;
        g.validate();
        return g;
    }

    void indication_model::validate() const
    {
        if (latency_s < 0.0 || application_delay_s < 0.0)
            throw std::invalid_argument("indication_model: delays must be >= 0");
        if (bler < 0.0 || bler >= 1.0)
            throw std::invalid_argument("indication_model: bler must be in [0, 1)");
    }

    void beam_sim_config::validate() const
    {
        if (grids.empty())
            throw std::invalid_argument("beam_sim_config: no beam grids");
        for (const auto& g : grids)
            g.validate();
        for (const auto& site : interferers)
        {
            site.grid.validate();
            if (site.target.n_elem != 2)
                throw std::invalid_argument("beam_sim_config: interferer target must be 2D");
        }
        traj.validate();
        model.validate();
        if (!(substep_s > 0.0))
            throw std::invalid_argument("beam_sim_config: substep must be > 0");
    }

    beam_sim_config make_preset(const std::string& name)
    {
        beam_sim_config cfg;
        if (name == "duh")
        {
            // one roadside site 3 m from a straight 100 m road segment; 80
            // pencil beams (~2.2 degree) make the switch rate near the closest
            // approach outrun the slow-indication latency
            cfg.grids = {make_sector_grid(0.0, 3.0, std::atan2(-3.0, -50.0),
                                          std::atan2(-3.0, 50.0), 80)};
            cfg.traj.waypoints = arma::mat{{-50.0, 0.0}, {50.0, 0.0}};
            cfg.traj.speed_mps = 100.0 / 3.0; // 120 km/h
            cfg.traj.sample_spacing_m = 1.0;
            cfg.traj.sample_count = 100;
        }
        else if (name == "hst")
        {
            // three track-side sites 100 m apart, 5 m from the track
            for (double x : {-100.0, 0.0, 100.0})
            {
                const double lo = std::atan2(-5.0, -150.0 - x);
                const double hi = std::atan2(-5.0, 150.0 - x);
                beam_grid g = make_sector_grid(x, 5.0, std::min(lo, hi), std::max(lo, hi), 48);
                cfg.grids.push_back(g);
            }
            cfg.traj.waypoints = arma::mat{{-150.0, 0.0}, {150.0, 0.0}};
            cfg.traj.speed_mps = 100.0 / 3.0;
            cfg.traj.sample_spacing_m = 3.0;
            cfg.traj.sample_count = 100;
        }
        else
            throw std::invalid_argument("make_preset: unknown scenario " + name);
        return cfg;
    }

    arma::uword best_beam(const std::vector<beam_grid>& grids, const arma::rowvec& point)
    {
        if (grids.empty())
            throw std::invalid_argument("best_beam: no grids");
        double best = -arma::datum::inf;
        arma::uword best_index = 0, offset = 0;
        for (const auto& g : grids)
        {
            for (arma::uword b = 0; b < g.beam_centers.n_elem; ++b)
                if (g.gain_db(b, point) > best)
                {
                    best = g.gain_db(b, point);
                    best_index = offset + b;
                }
            offset += g.beam_centers.n_elem;
        }
        return best_index;
    }

    namespace
    {
        struct beam_ref
        {
            const beam_grid* grid;
            arma::uword local;
        };

        std::vector<beam_ref> flatten(const std::vector<beam_grid>& grids)
        {
            std::vector<beam_ref> out;
            for (const auto& g : grids)
                for (arma::uword b = 0; b < g.beam_centers.n_elem; ++b)
                    out.push_back({&g, b});
            return out;
        }

        // attempts until success: inverse geometric CDF from one uniform draw,
        // so sweeps over bler reuse identical randomness per indication event
        arma::uword attempts_needed(double bler, double u)
        {
            if (bler <= 0.0)
                return 1;
            return 1 + static_cast<arma::uword>(std::floor(std::log(1.0 - u) / std::log(bler)));
        }
    } // namespace

    std::vector<beam_sample> simulate(const beam_sim_config& config, std::uint64_t seed)
    {
        config.validate();
        const auto beams = flatten(config.grids);
        const double interval = config.traj.sample_interval_s();
        const arma::uword substeps =
            std::max<arma::uword>(1, static_cast<arma::uword>(std::round(interval / config.substep_s)));
        const double dt = interval / static_cast<double>(substeps);
        const double noise_mw = std::pow(10.0, config.noise_dbm / 10.0);

        arma::uword applied = best_beam(config.grids, config.traj.position_at(0.0));
        bool pending = false;
        arma::uword pending_beam = 0;
        double pending_apply_time = 0.0;
        std::uint64_t indication_count = 0;

        // interferer sites keep the beam serving their own fixed target
        std::vector<arma::uword> interferer_beams;
        for (const auto& site : config.interferers)
            interferer_beams.push_back(best_beam({site.grid}, site.target));

        std::vector<beam_sample> out;
        out.reserve(config.traj.sample_count);

        const arma::uword total_steps = (config.traj.sample_count - 1) * substeps;
        for (arma::uword step = 0; step <= total_steps; ++step)
        {
            const double t = static_cast<double>(step) * dt;
            const arma::rowvec pos = config.traj.position_at(t * config.traj.speed_mps);

            if (pending && t >= pending_apply_time)
            {
                applied = pending_beam;
                pending = false;
            }
            const arma::uword ideal = best_beam(config.grids, pos);
            if (!pending && ideal != applied)
            {
                rng draw(derive_seed(seed, indication_count++));
                const arma::uword k = attempts_needed(config.model.bler, draw.uniform());
                pending = true;
                pending_beam = ideal;
                pending_apply_time = t + static_cast<double>(k) * config.model.latency_s +
                                     config.model.application_delay_s;
                if (t >= pending_apply_time)
                {
                    applied = pending_beam;
                    pending = false;
                }
            }

            if (step % substeps == 0)
            {
                const arma::uword m = step / substeps;
                const beam_ref& serving = beams[applied];
                const double d =
                    std::max(1.0, arma::norm(pos - serving.grid->trp_position));
                const double rx_dbm = config.tx_power_dbm +
                                      serving.grid->gain_db(serving.local, pos) -
                                      (config.pathloss_ref_db +
                                       10.0 * config.pathloss_exponent * std::log10(d));
                double interference_mw = 0.0;
                for (std::size_t i = 0; i < config.interferers.size(); ++i)
                {
                    const auto& site = config.interferers[i];
                    const double di = std::max(1.0, arma::norm(pos - site.grid.trp_position));
                    const double rx_i = config.tx_power_dbm +
                                        site.grid.gain_db(interferer_beams[i], pos) -
                                        (config.pathloss_ref_db +
                                         10.0 * config.pathloss_exponent * std::log10(di));
                    interference_mw += std::pow(10.0, rx_i / 10.0);
                }
                const double sinr =
                    std::pow(10.0, rx_dbm / 10.0) / (interference_mw + noise_mw);
                beam_sample sample;
                sample.sample_index = m;
                sample.position_m = static_cast<double>(m) * config.traj.sample_spacing_m;
                sample.serving_beam = applied;
                sample.ideal_beam = ideal;
                sample.sinr_db = 10.0 * std::log10(sinr);
                sample.se = std::min(std::log2(1.0 + sinr), 7.4);
                out.push_back(sample);
            }
        }
        return out;
    }

    double mean_se(const std::vector<beam_sample>& samples)
    {
        if (samples.empty())
            throw std::invalid_argument("mean_se: no samples");
        double acc = 0.0;
        for (const auto& s : samples)
            acc += s.se;
        return acc / static_cast<double>(samples.size());
    }

} // namespace mimosim
