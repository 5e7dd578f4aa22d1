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

// Covered tests:
// - Root-sequence correlation properties against brute-force sums
// - Cyclic-shift phase additivity and delay-domain shift behavior
// - Received-signal composition against a term-by-term oracle
// - Despreading expansion of the interference term
// - Delay transforms: impulse cases, inversion, Parseval
// - PDP accumulation, whitened interference flatness vs the closed-form level
// - Tap selection and masked channel estimation vs a dense transform oracle
// - Antenna switching and frequency hopping / partial sounding schedules

#include <catch2/catch_amalgamated.hpp>

#include "mimosim/srs.hpp"

using namespace mimosim;

namespace
{
    constexpr double two_pi = 6.283185307179586476925287;

    arma::cx_vec random_channel(rng& gen, arma::uword m)
    {
        arma::cx_vec h(m);
        for (auto& v : h)
            v = gen.cx_gaussian();
        return h;
    }

    // channel with the given delay taps (delay-domain construction)
    arma::cx_vec tap_channel(const std::vector<std::pair<arma::uword, cx>>& taps, arma::uword m)
    {
        arma::cx_vec d(m, arma::fill::zeros);
        for (const auto& [t, g] : taps)
            d(t) = g;
        return from_delay_domain(d);
    }
} // namespace

TEST_CASE("root sequence correlation properties")
{
    SECTION("constant amplitude")
    {
        srs_sequence s = gen_sequence(5, 139);
        for (const auto& v : s.values)
            REQUIRE(std::abs(std::abs(v) - 1.0) < 1e-12);
    }

    SECTION("cyclic autocorrelation vanishes at nonzero lags")
    {
        srs_sequence s = gen_sequence(1, 139);
        const arma::uword m = 139;
        for (arma::uword lag : {7u, 1u, 68u})
        {
            cx acc = 0.0;
            for (arma::uword k = 0; k < m; ++k)
                acc += s.values(k) * std::conj(s.values((k + lag) % m));
            REQUIRE(std::abs(acc) < 1e-9);
        }
    }

    SECTION("cross correlation between roots 1 and 2 is flat at sqrt(139)")
    {
        srs_sequence a = gen_sequence(1, 139);
        srs_sequence b = gen_sequence(2, 139);
        const arma::uword m = 139;
        for (arma::uword lag = 0; lag < m; ++lag)
        {
            cx acc = 0.0;
            for (arma::uword k = 0; k < m; ++k)
                acc += a.values(k) * std::conj(b.values((k + lag) % m));
            REQUIRE(std::abs(acc) == Catch::Approx(std::sqrt(139.0)).margin(1e-9));
        }
    }

    SECTION("invalid parameters are rejected")
    {
        REQUIRE_THROWS(gen_sequence(0, 139));
        REQUIRE_THROWS(gen_sequence(139, 139));
        REQUIRE_THROWS(gen_sequence(1, 140)); // not prime
    }

    SECTION("cyclic extension wraps the base sequence")
    {
        srs_sequence s = gen_sequence(3, 11);
        srs_sequence e = cyclic_extend(s, 16);
        for (arma::uword k = 0; k < 16; ++k)
            REQUIRE(e.values(k) == s.values(k % 11));
    }
}

TEST_CASE("cyclic shift application")
{
    srs_sequence s = gen_sequence(4, 53);

    SECTION("zero shift is the identity")
    {
        srs_sequence t = apply_cs(s, 0.0);
        REQUIRE(arma::abs(t.values - s.values).max() < 1e-15);
    }

    SECTION("shifts compose additively")
    {
        srs_sequence once = apply_cs(s, 1.9);
        srs_sequence twice = apply_cs(apply_cs(s, 1.1), 0.8);
        REQUIRE(arma::abs(once.values - twice.values).max() < 1e-12);
    }

    SECTION("an on-grid shift circularly shifts the delay image")
    {
        // cyclic phase shift equals a delay shift: for alpha = 2*pi*k/M the
        // despread image moves to tap (M - k) mod M with the IFFT convention
        const arma::uword m = 53, k = 9;
        const double alpha = two_pi * double(k) / double(m);
        arma::cx_vec despread_flat = apply_cs(s, alpha).values % arma::conj(s.values);
        arma::cx_vec image = to_delay_domain(despread_flat);
        const arma::uword peak = arma::abs(image).index_max();
        REQUIRE(peak == (m - k) % m);
        // off-peak energy is negligible for on-grid shifts
        arma::vec mags = arma::abs(image);
        mags(peak) = 0.0;
        REQUIRE(mags.max() < 1e-12);
    }
}

TEST_CASE("received signal composition")
{
    const arma::uword m = 53;
    rng gch(21);
    arma::cx_vec h = random_channel(gch, m);
    arma::cx_vec hi = random_channel(gch, m);
    srs_sequence r = apply_cs(gen_sequence(1, m), 0.7);
    srs_sequence ri = apply_cs(gen_sequence(2, m), 2.3);

    SECTION("clean single user is r times h")
    {
        rng gen(1);
        srs_observation obs = receive(h, r, {}, {}, 0.0, gen);
        REQUIRE(arma::abs(obs.y - r.values % h).max() < 1e-14);
    }

    SECTION("zero channels leave only noise at the configured power")
    {
        rng gen(2);
        arma::cx_vec zero(m, arma::fill::zeros);
        srs_observation obs = receive(zero, r, zero, ri, 0.25, gen);
        const double mean_power = arma::mean(arma::square(arma::abs(obs.y)));
        REQUIRE(mean_power == Catch::Approx(0.25).epsilon(0.4));
    }

    SECTION("full composition matches the term-by-term oracle")
    {
        rng gen(3);
        srs_observation obs = receive(h, r, hi, ri, 0.1, gen);

        rng oracle_gen(3);
        const double sigma = std::sqrt(0.1);
        for (arma::uword k = 0; k < m; ++k)
        {
            const cx expected =
                r.values(k) * h(k) + ri.values(k) * hi(k) + oracle_gen.cx_gaussian(1.0) * sigma;
            REQUIRE(std::abs(obs.y(k) - expected) < 1e-14);
        }
    }

    SECTION("length mismatch is rejected")
    {
        rng gen(4);
        REQUIRE_THROWS(receive(random_channel(gen, 11), r, {}, {}, 0.0, gen));
    }
}

TEST_CASE("despreading")
{
    const arma::uword m = 53;
    rng gch(22);
    arma::cx_vec h = random_channel(gch, m);

    SECTION("clean observation recovers the channel exactly")
    {
        srs_sequence r = apply_cs(gen_sequence(1, m), 1.3);
        rng gen(5);
        srs_observation obs = receive(h, r, {}, {}, 0.0, gen);
        REQUIRE(arma::abs(despread(obs, r) - h).max() < 1e-13);
    }

    SECTION("an all-ones sequence despreads to the identity")
    {
        srs_sequence ones;
        ones.values = arma::cx_vec(m, arma::fill::ones);
        srs_observation obs;
        obs.y = h;
        REQUIRE(arma::abs(despread(obs, ones) - h).max() == 0.0);
    }

    SECTION("interference term expands per the conjugate product")
    {
        const double alpha = 0.9, alpha_i = 2.1;
        srs_sequence base_t = gen_sequence(1, m);
        srs_sequence base_i = gen_sequence(2, m);
        srs_sequence r = apply_cs(base_t, alpha);
        srs_sequence ri = apply_cs(base_i, alpha_i);
        arma::cx_vec hi = random_channel(gch, m);
        arma::cx_vec zero(m, arma::fill::zeros);
        rng gen(6);
        srs_observation obs = receive(zero, r, hi, ri, 0.0, gen);
        arma::cx_vec term = despread(obs, r);
        for (arma::uword k = 0; k < m; ++k)
        {
            const cx expected = std::polar(1.0, (alpha_i - alpha) * double(k)) *
                                std::conj(base_t.values(k)) * base_i.values(k) * hi(k);
            REQUIRE(std::abs(term(k) - expected) < 1e-12);
        }
    }
}

TEST_CASE("delay transforms")
{
    const arma::uword m = 53;

    SECTION("a flat channel is an impulse at tap zero")
    {
        arma::cx_vec flat(m, arma::fill::ones);
        arma::cx_vec d = to_delay_domain(flat);
        REQUIRE(std::abs(d(0) - cx(1.0, 0.0)) < 1e-12);
        d(0) = 0.0;
        REQUIRE(arma::abs(d).max() < 1e-12);
    }

    SECTION("forward FFT inverts the transform")
    {
        rng gen(7);
        arma::cx_vec x = random_channel(gen, m);
        REQUIRE(arma::abs(from_delay_domain(to_delay_domain(x)) - x).max() < 1e-12);
    }

    SECTION("Parseval holds with the 1/M convention")
    {
        rng gen(8);
        arma::cx_vec x = random_channel(gen, m);
        const double lhs = std::pow(arma::norm(to_delay_domain(x)), 2);
        REQUIRE(lhs == Catch::Approx(std::pow(arma::norm(x), 2) / double(m)).margin(1e-9));
    }
}

TEST_CASE("PDP accumulation and whitening")
{
    const arma::uword m = 139;

    SECTION("a single transmission gives the squared magnitudes")
    {
        rng gen(9);
        arma::cx_vec d = random_channel(gen, m);
        delay_profile p = accumulate_pdp({d});
        REQUIRE(arma::abs(p.pdp - arma::square(arma::abs(d))).max() < 1e-14);
        REQUIRE(p.transmissions_accumulated == 1);
    }

    SECTION("identical inputs average to any single one")
    {
        rng gen(10);
        arma::cx_vec d = random_channel(gen, m);
        delay_profile one = accumulate_pdp({d});
        delay_profile many = accumulate_pdp({d, d, d, d});
        REQUIRE(arma::abs(one.pdp - many.pdp).max() < 1e-14);
    }

    SECTION("empty input is rejected")
    {
        REQUIRE_THROWS(accumulate_pdp({}));
    }

    SECTION("energy conservation across the transform")
    {
        rng gen(11);
        std::vector<arma::cx_vec> delay;
        double freq_energy = 0.0;
        for (int n = 0; n < 8; ++n)
        {
            arma::cx_vec y = random_channel(gen, m);
            freq_energy += std::pow(arma::norm(y), 2);
            delay.push_back(to_delay_domain(y));
        }
        delay_profile p = accumulate_pdp(delay);
        REQUIRE(arma::accu(p.pdp) ==
                Catch::Approx(freq_energy / 8.0 / double(m)).margin(1e-9));
    }

    SECTION("hopped interference-only PDP is flat at the average level")
    {
        // interference with rich delay content, CS hopping on both UEs,
        // N = 1024 transmissions, no target, no noise
        const arma::uword n = 1024;
        rng gen(12);
        srs_sequence base_t = gen_sequence(1, m);
        srs_sequence base_i = gen_sequence(2, m);
        arma::cx_vec hi = random_channel(gen, m);
        arma::cx_vec zero(m, arma::fill::zeros);

        cs_schedule cs_t = cs_schedule::make_hopping(n, gen);
        cs_schedule cs_i = cs_schedule::make_hopping(n, gen);

        std::vector<arma::cx_vec> delay;
        for (arma::uword k = 0; k < n; ++k)
        {
            srs_sequence r = apply_cs(base_t, cs_t.values[k]);
            srs_sequence ri = apply_cs(base_i, cs_i.values[k]);
            srs_observation obs = receive(zero, r, hi, ri, 0.0, gen, k);
            delay.push_back(to_delay_domain(despread(obs, r)));
        }
        delay_profile p = accumulate_pdp(delay);

        // closed-form whitened level: per-tap average of the unshifted image,
        // equal to ||h'||^2 / M^2 for unit-modulus sequences
        const double level = std::pow(arma::norm(hi), 2) / double(m * m);
        REQUIRE(p.pdp.max() / level < 1.2);
        REQUIRE(p.pdp.min() / level > 0.8);
    }
}

TEST_CASE("tap selection")
{
    const arma::uword m = 53;

    SECTION("a noiseless single-tap channel selects exactly that tap")
    {
        arma::cx_vec h = tap_channel({{17, cx(1.0, 0.3)}}, m);
        srs_sequence r = apply_cs(gen_sequence(1, m), 0.4);
        rng gen(13);
        srs_observation obs = receive(h, r, {}, {}, 0.0, gen);
        delay_profile p = accumulate_pdp({to_delay_domain(despread(obs, r))});
        arma::uvec taps = select_taps(p);
        REQUIRE(taps.n_elem == 1);
        REQUIRE(taps(0) == 17);
    }

    SECTION("an all-zero profile selects nothing")
    {
        delay_profile p;
        p.pdp.zeros(m);
        REQUIRE(select_taps(p).n_elem == 0);
    }

    SECTION("max_taps keeps the strongest taps")
    {
        delay_profile p;
        p.pdp.zeros(m);
        p.pdp(5) = 1.0;
        p.pdp(9) = 3.0;
        p.pdp(20) = 2.0;
        arma::uvec taps = select_taps(p, 3.0, 2);
        REQUIRE(taps.n_elem == 2);
        REQUIRE(taps(0) == 9);
        REQUIRE(taps(1) == 20);
    }

    SECTION("hopping finds true taps more reliably than fixed shifts")
    {
        // small Monte-Carlo; the acceptance suite runs the full comparison
        const arma::uword m2 = 139, n = 64;
        rng gen(14);
        int err_hop = 0, err_fixed = 0;
        for (int drop = 0; drop < 20; ++drop)
        {
            // SNR 10 dB, INR 10 dB at unit noise power
            std::vector<std::pair<arma::uword, cx>> true_taps;
            for (int t = 0; t < 3; ++t)
                true_taps.push_back({gen.integer(m2 / 2), gen.cx_gaussian(10.0 / 3.0)});
            arma::cx_vec h = tap_channel(true_taps, m2);
            arma::cx_vec hi = tap_channel({{arma::uword(3 + gen.integer(m2 / 2)),
                                            gen.cx_gaussian(1.0)}},
                                          m2);
            hi *= std::sqrt(10.0) / (arma::norm(hi) / std::sqrt(double(m2))); // INR 10 dB at unit noise

            srs_sequence base_t = gen_sequence(1, m2);
            srs_sequence base_i = gen_sequence(2, m2);
            for (bool hopping : {false, true})
            {
                cs_schedule cs_t = hopping ? cs_schedule::make_hopping(n, gen)
                                           : cs_schedule::make_fixed(0.9, n);
                cs_schedule cs_i = hopping ? cs_schedule::make_hopping(n, gen)
                                           : cs_schedule::make_fixed(2.2, n);
                std::vector<arma::cx_vec> delay;
                for (arma::uword k = 0; k < n; ++k)
                {
                    srs_sequence r = apply_cs(base_t, cs_t.values[k]);
                    srs_sequence ri = apply_cs(base_i, cs_i.values[k]);
                    srs_observation obs = receive(h, r, hi, ri, 1.0, gen, k);
                    delay.push_back(to_delay_domain(despread(obs, r)));
                }
                arma::uvec taps = select_taps(accumulate_pdp(delay), 3.0);
                std::set<arma::uword> got(taps.begin(), taps.end());
                std::set<arma::uword> want;
                for (const auto& [t, g] : true_taps)
                    want.insert(t);
                int errors = 0;
                for (auto t : want)
                    if (!got.count(t))
                        ++errors;
                for (auto t : got)
                    if (!want.count(t))
                        ++errors;
                (hopping ? err_hop : err_fixed) += errors;
            }
        }
        REQUIRE(err_hop < err_fixed);
    }
}

TEST_CASE("channel estimation")
{
    const arma::uword m = 53;

    SECTION("all taps selected with a clean observation gives zero error")
    {
        rng gen(15);
        arma::cx_vec h = random_channel(gen, m);
        srs_sequence r = apply_cs(gen_sequence(1, m), 1.0);
        srs_observation obs = receive(h, r, {}, {}, 0.0, gen);
        channel_estimate est = estimate_channel({obs}, {r}, arma::regspace<arma::uvec>(0, m - 1), {h});
        REQUIRE(est.mse < 1e-20);
        REQUIRE(arma::abs(est.h_hat - h).max() < 1e-10);
    }

    SECTION("an empty tap set forces the estimate to zero and MSE to one")
    {
        rng gen(16);
        arma::cx_vec h = random_channel(gen, m);
        srs_sequence r = gen_sequence(1, m);
        srs_observation obs = receive(h, r, {}, {}, 0.0, gen);
        channel_estimate est = estimate_channel({obs}, {r}, arma::uvec{}, {h});
        REQUIRE(est.mse == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("M = 16 masked estimate matches a dense transform oracle")
    {
        const arma::uword n16 = 16;
        rng gen(17);
        arma::cx_vec h = random_channel(gen, n16);
        srs_sequence r;
        r.values.set_size(n16);
        for (arma::uword k = 0; k < n16; ++k)
            r.values(k) = std::polar(1.0, gen.uniform(0.0, two_pi));
        srs_observation obs;
        obs.y = r.values % h;
        arma::uvec taps{1, 5, 6, 11};

        channel_estimate est = estimate_channel({obs}, {r}, taps, {h});

        // dense oracle with explicit transform sums
        arma::cx_vec despread_o = obs.y % arma::conj(r.values);
        arma::cx_vec d(n16, arma::fill::zeros);
        for (arma::uword tau = 0; tau < n16; ++tau)
        {
            cx acc = 0.0;
            for (arma::uword k = 0; k < n16; ++k)
                acc += despread_o(k) * std::polar(1.0, two_pi * double(k * tau) / double(n16));
            d(tau) = acc / double(n16);
        }
        arma::cx_vec masked(n16, arma::fill::zeros);
        for (arma::uword t = 0; t < taps.n_elem; ++t)
            masked(taps(t)) = d(taps(t));
        arma::cx_vec h_oracle(n16, arma::fill::zeros);
        double num = 0.0, den = 0.0;
        for (arma::uword k = 0; k < n16; ++k)
        {
            cx acc = 0.0;
            for (arma::uword tau = 0; tau < n16; ++tau)
                acc += masked(tau) * std::polar(1.0, -two_pi * double(k * tau) / double(n16));
            h_oracle(k) = acc;
            num += std::norm(h_oracle(k) - h(k));
            den += std::norm(h(k));
        }
        REQUIRE(arma::abs(est.h_hat - h_oracle).max() < 1e-12);
        REQUIRE(est.mse == Catch::Approx(num / den).margin(1e-12));
    }
}

TEST_CASE("resource schedules")
{
    SECTION("2T4R over one hop matches the two-symbol switching pattern")
    {
        srs_resource_map cfg;
        cfg.ports = 4;
        cfg.symbols = 2;
        auto sched = resource_schedule(cfg, 48);
        REQUIRE(sched.size() == 2);
        REQUIRE(sched[0].symbol == 0);
        REQUIRE(arma::all(sched[0].ports == arma::uvec{0, 1}));
        REQUIRE(sched[1].symbol == 1);
        REQUIRE(arma::all(sched[1].ports == arma::uvec{2, 3}));
        REQUIRE(sched[0].band_start == 0);
        REQUIRE(sched[0].band_stop == 48);

        // full-band channel assembled exactly in the noiseless case
        rng gen(18);
        arma::cx_mat truth(4, 48);
        for (arma::uword p = 0; p < 4; ++p)
            truth.row(p) = random_channel(gen, 48).st();
        arma::cx_mat assembled(4, 48, arma::fill::zeros);
        arma::umat covered(4, 48, arma::fill::zeros);
        for (const auto& a : sched)
            for (arma::uword i = 0; i < a.ports.n_elem; ++i)
                for (arma::uword s = a.band_start; s < a.band_stop; ++s)
                {
                    assembled(a.ports(i), s) = truth(a.ports(i), s);
                    covered(a.ports(i), s) += 1;
                }
        REQUIRE(arma::all(arma::vectorise(covered) == 1));
        REQUIRE(arma::abs(assembled - truth).max() == 0.0);
    }

    SECTION("four hops partition the band")
    {
        srs_resource_map cfg;
        cfg.ports = 2;
        cfg.symbols = 1;
        cfg.hop_count = 4;
        auto sched = resource_schedule(cfg, 52);
        arma::uvec covered(52, arma::fill::zeros);
        for (const auto& a : sched)
            for (arma::uword s = a.band_start; s < a.band_stop; ++s)
                covered(s) += 1;
        REQUIRE(arma::all(covered == 1)); // union = full band, no overlap
    }

    SECTION("partial factor 4 multiplexes four UEs on disjoint quarters")
    {
        srs_resource_map cfg;
        cfg.ports = 1;
        cfg.symbols = 1;
        cfg.hop_count = 2;
        cfg.partial_factor = 4;
        const arma::uword band = 64;
        auto sched = resource_schedule(cfg, band);

        std::set<arma::uword> ues;
        for (const auto& a : sched)
            ues.insert(a.ue);
        REQUIRE(ues.size() == 4); // 4x the UEs of partial factor 1

        // at any transmission, assignments are disjoint
        for (arma::uword t = 0; t < cfg.hop_count * cfg.partial_factor; ++t)
        {
            arma::uvec used(band, arma::fill::zeros);
            for (const auto& a : sched)
                if (a.transmission == t)
                    for (arma::uword s = a.band_start; s < a.band_stop; ++s)
                        used(s) += 1;
            REQUIRE(used.max() <= 1);
        }

        // every UE covers the full band over the period
        for (arma::uword ue = 0; ue < 4; ++ue)
        {
            arma::uvec covered(band, arma::fill::zeros);
            for (const auto& a : sched)
                if (a.ue == ue)
                    for (arma::uword s = a.band_start; s < a.band_stop; ++s)
                        covered(s) += 1;
            REQUIRE(arma::all(covered == 1));
        }
    }

    SECTION("infeasible configurations are rejected")
    {
        srs_resource_map cfg;
        cfg.ports = 0;
        REQUIRE_THROWS(resource_schedule(cfg, 48));
    }
}
