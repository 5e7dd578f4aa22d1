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

#include "mimosim/srs.hpp"

#include <stdexcept>

namespace mimosim
{
    constexpr double pi = 3.141592653589793238462643;
    constexpr double two_pi = 6.283185307179586476925287;

    namespace
    {
        bool is_odd_prime(arma::uword n)
        {
            if (n < 3 || n % 2 == 0)
                return false;
            for (arma::uword d = 3; d * d <= n; d += 2)
                if (n % d == 0)
                    return false;
            return true;
        }
    } // namespace

    cs_schedule cs_schedule::make_fixed(double alpha, arma::uword transmissions)
    {
        cs_schedule s;
        s.mode = cs_mode::fixed;
        s.values.assign(transmissions, alpha);
        return s;
    }

    cs_schedule cs_schedule::make_hopping(arma::uword transmissions, rng& gen)
    {
        cs_schedule s;
        s.mode = cs_mode::hopping;
        s.values.resize(transmissions);
        for (auto& v : s.values)
            v = gen.uniform(0.0, two_pi);
        return s;
    }

    cs_schedule cs_schedule::make_hopping_grid(arma::uword transmissions, rng& gen,
                                               arma::uword levels)
    {
        cs_schedule s;
        s.mode = cs_mode::hopping;
        s.values.resize(transmissions);
        for (auto& v : s.values)
            v = two_pi * static_cast<double>(gen.integer(levels)) / static_cast<double>(levels);
        return s;
    }

    srs_sequence gen_sequence(arma::uword root, arma::uword length)
    {
        if (!is_odd_prime(length))
            throw std::invalid_argument("gen_sequence: length must be an odd prime");
        if (root < 1 || root >= length)
            throw std::invalid_argument("gen_sequence: root must satisfy 1 <= root < length");
        srs_sequence seq;
        seq.root = root;
        seq.values.set_size(length);
        for (arma::uword m = 0; m < length; ++m)
        {
            // quadratic phase q*m*(m+1)/M; m(m+1) is even so the half is exact
            const arma::uword mm = (m * (m + 1) / 2) % length;
            seq.values(m) =
                std::polar(1.0, -two_pi * static_cast<double>(root * mm % length) /
                                    static_cast<double>(length));
        }
        return seq;
    }

    srs_sequence cyclic_extend(const srs_sequence& seq, arma::uword length)
    {
        srs_sequence out;
        out.root = seq.root;
        out.values.set_size(length);
        for (arma::uword m = 0; m < length; ++m)
            out.values(m) = seq.values(m % seq.values.n_elem);
        return out;
    }

    srs_sequence apply_cs(const srs_sequence& seq, double alpha)
    {
        srs_sequence out;
        out.root = seq.root;
        out.values.set_size(seq.values.n_elem);
        for (arma::uword m = 0; m < seq.values.n_elem; ++m)
            out.values(m) = seq.values(m) * std::polar(1.0, alpha * static_cast<double>(m));
        return out;
    }

    srs_observation receive(const arma::cx_vec& target_channel, const srs_sequence& target_seq,
                            const arma::cx_vec& interferer_channel, const srs_sequence& interferer_seq,
                            double noise_power, rng& gen, arma::uword transmission_index)
    {
        const arma::uword m = target_channel.n_elem;
        if (target_seq.values.n_elem != m)
            throw std::invalid_argument("receive: target sequence/channel length mismatch");
        const bool with_interferer = interferer_channel.n_elem > 0;
        if (with_interferer &&
            (interferer_channel.n_elem != m || interferer_seq.values.n_elem != m))
            throw std::invalid_argument("receive: interferer sequence/channel length mismatch");

        srs_observation obs;
        obs.transmission_index = transmission_index;
        obs.y.set_size(m);
        const double sigma = std::sqrt(noise_power);
        for (arma::uword k = 0; k < m; ++k)
        {
            cx v = target_seq.values(k) * target_channel(k);
            if (with_interferer)
                v += interferer_seq.values(k) * interferer_channel(k);
            if (noise_power > 0.0)
                v += gen.cx_gaussian(1.0) * sigma;
            obs.y(k) = v;
        }
        return obs;
    }

    arma::cx_vec despread(const srs_observation& obs, const srs_sequence& seq_with_cs)
    {
        if (obs.y.n_elem != seq_with_cs.values.n_elem)
            throw std::invalid_argument("despread: length mismatch");
        return obs.y % arma::conj(seq_with_cs.values);
    }

    arma::cx_vec to_delay_domain(const arma::cx_vec& despread_seq)
    {
        return arma::ifft(despread_seq);
    }

    arma::cx_vec from_delay_domain(const arma::cx_vec& delay_seq)
    {
        return arma::fft(delay_seq);
    }

    delay_profile accumulate_pdp(const std::vector<arma::cx_vec>& delay_vectors)
    {
        if (delay_vectors.empty())
            throw std::invalid_argument("accumulate_pdp: no transmissions");
        const arma::uword m = delay_vectors.front().n_elem;
        delay_profile profile;
        profile.pdp.zeros(m);
        for (const auto& v : delay_vectors)
        {
            if (v.n_elem != m)
                throw std::invalid_argument("accumulate_pdp: inconsistent lengths");
            profile.pdp += arma::square(arma::abs(v));
        }
        profile.pdp /= static_cast<double>(delay_vectors.size());
        profile.transmissions_accumulated = delay_vectors.size();
        profile.noise_floor_estimate = arma::median(profile.pdp);
        return profile;
    }

    arma::uvec select_taps(const delay_profile& profile, double threshold_factor,
                           arma::uword max_taps)
    {
        // relative floor keeps transform roundoff out of noise-free profiles
        const double floor =
            std::max(profile.noise_floor_estimate, 1e-12 * profile.pdp.max());
        const double threshold = threshold_factor * floor;
        std::vector<arma::uword> taps;
        for (arma::uword t = 0; t < profile.pdp.n_elem; ++t)
            if (profile.pdp(t) > threshold)
                taps.push_back(t);
        if (max_taps > 0 && taps.size() > max_taps)
        {
            std::stable_sort(taps.begin(), taps.end(), [&](arma::uword a, arma::uword b) {
                return profile.pdp(a) > profile.pdp(b);
            });
            taps.resize(max_taps);
            std::sort(taps.begin(), taps.end());
        }
        return arma::uvec(taps);
    }

    channel_estimate estimate_channel(const std::vector<srs_observation>& observations,
                                      const std::vector<srs_sequence>& seqs_with_cs,
                                      const arma::uvec& taps,
                                      const std::vector<arma::cx_vec>& truths)
    {
        if (observations.empty() || observations.size() != seqs_with_cs.size())
            throw std::invalid_argument("estimate_channel: observation/sequence count mismatch");
        if (truths.size() != 1 && truths.size() != observations.size())
            throw std::invalid_argument("estimate_channel: truth count mismatch");
        const arma::uword m = observations.front().y.n_elem;
        for (arma::uword t = 0; t < taps.n_elem; ++t)
            if (taps(t) >= m)
                throw std::invalid_argument("estimate_channel: tap index out of range");

        arma::uvec mask(m, arma::fill::zeros);
        for (arma::uword t = 0; t < taps.n_elem; ++t)
            mask(taps(t)) = 1;

        channel_estimate est;
        est.h_hat.zeros(m);
        double num = 0.0, den = 0.0;
        for (std::size_t n = 0; n < observations.size(); ++n)
        {
            arma::cx_vec d = to_delay_domain(despread(observations[n], seqs_with_cs[n]));
            for (arma::uword t = 0; t < m; ++t)
                if (!mask(t))
                    d(t) = 0.0;
            arma::cx_vec h_n = from_delay_domain(d);
            est.h_hat += h_n;
            const arma::cx_vec& truth = truths.size() == 1 ? truths.front() : truths[n];
            num += std::pow(arma::norm(h_n - truth), 2);
            den += std::pow(arma::norm(truth), 2);
        }
        est.h_hat /= static_cast<double>(observations.size());
        if (den <= 0.0)
            throw std::invalid_argument("estimate_channel: zero-energy truth");
        est.mse = num / den;
        return est;
    }

    void srs_resource_map::validate() const
    {
        if (ports < 1 || symbols < 1 || hop_count < 1 || partial_factor < 1)
            throw std::invalid_argument("srs_resource_map: counts must be >= 1");
        const arma::uword per_symbol = (ports + symbols - 1) / symbols;
        if (per_symbol * symbols < ports)
            throw std::invalid_argument("srs_resource_map: antenna switching infeasible");
    }

    std::vector<srs_assignment> resource_schedule(const srs_resource_map& cfg,
                                                  arma::uword subcarriers)
    {
        cfg.validate();
        if (subcarriers < cfg.hop_count * cfg.partial_factor)
            throw std::invalid_argument("resource_schedule: band too small for the configuration");

        const arma::uword per_symbol = (cfg.ports + cfg.symbols - 1) / cfg.symbols;
        const arma::uword hop_width = subcarriers / cfg.hop_count;

        std::vector<srs_assignment> out;
        // one sounding period covers every (hop, partial-piece) pair per UE
        for (arma::uword t = 0; t < cfg.hop_count * cfg.partial_factor; ++t)
        {
            const arma::uword hop = t % cfg.hop_count;
            const arma::uword round = t / cfg.hop_count;
            const arma::uword hop_start = hop * hop_width;
            const arma::uword width =
                (hop + 1 == cfg.hop_count ? subcarriers - hop_start : hop_width);
            for (arma::uword ue = 0; ue < cfg.partial_factor; ++ue)
            {
                const arma::uword piece = (round + ue) % cfg.partial_factor;
                const arma::uword piece_start = hop_start + piece * (width / cfg.partial_factor);
                const arma::uword piece_stop = piece + 1 == cfg.partial_factor
                                                   ? hop_start + width
                                                   : hop_start + (piece + 1) * (width / cfg.partial_factor);
                for (arma::uword s = 0; s < cfg.symbols; ++s)
                {
                    const arma::uword lo = s * per_symbol;
                    if (lo >= cfg.ports)
                        break;
                    const arma::uword hi = std::min(cfg.ports, lo + per_symbol);
                    srs_assignment a;
                    a.transmission = t;
                    a.symbol = s;
                    a.ue = ue;
                    a.ports = arma::regspace<arma::uvec>(lo, hi - 1);
                    a.band_start = piece_start;
                    a.band_stop = piece_stop;
                    out.push_back(a);
                }
            }
        }
        return out;
    }

} // namespace mimosim
