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
// - Coordination sets vs a filter-by-definition oracle, boundary inclusion
// - Literal SINR structure, zero-forcing cross terms, rank-1 joint combining
// - UPT ratios, merge invariance, permutation invariance
// - RSRP regions as a total monotone partition
// - Weighted reference-signal uplink precoding vs an SVD oracle and random search
// - Cover-code port separation: exact Gram identity, flat-channel exactness,
//   leakage growth with delay spread
// - Drop pipeline: SU direct-formula check, joint vs single-TRP ordering,
//   ideal vs quantized feedback ordering

#include <catch2/catch_amalgamated.hpp>

#include "mimosim/cjt_eval.hpp"

using namespace mimosim;

namespace
{
    arma::cx_mat random_matrix(rng& gen, arma::uword rows, arma::uword cols)
    {
        arma::cx_mat m(rows, cols);
        for (auto& v : m)
            v = gen.cx_gaussian();
        return m;
    }
} // namespace

TEST_CASE("coordination set")
{
    SECTION("a dominant serving cell stands alone")
    {
        arma::uvec set = coordination_set(arma::vec{-60.0, -75.0, -80.0});
        REQUIRE(set.n_elem == 1);
        REQUIRE(set(0) == 0);
    }

    SECTION("a TRP exactly at the threshold is included")
    {
        arma::uvec set = coordination_set(arma::vec{-60.0, -70.0});
        REQUIRE(set.n_elem == 2);
    }

    SECTION("random RSRPs match the filter-by-definition oracle")
    {
        rng gen(41);
        for (int trial = 0; trial < 50; ++trial)
        {
            arma::vec rsrp(5);
            for (auto& v : rsrp)
                v = gen.uniform(-100.0, -50.0);
            arma::uvec set = coordination_set(rsrp, 10.0);
            const double serving = rsrp.max();
            std::vector<arma::uword> expect;
            for (arma::uword n = 0; n < 5; ++n)
                if (serving - rsrp(n) <= 10.0)
                    expect.push_back(n);
            REQUIRE(set.n_elem == expect.size());
            for (arma::uword i = 0; i < set.n_elem; ++i)
                REQUIRE(set(i) == expect[i]);
        }
    }

    SECTION("empty input is rejected")
    {
        REQUIRE_THROWS(coordination_set(arma::vec{}));
    }
}

TEST_CASE("SINR evaluation")
{
    SECTION("no interferer reduces to signal over noise")
    {
        rng gen(42);
        sinr_scenario sc;
        sc.noise_power = 0.5;
        sc.channels = {random_matrix(gen, 2, 8), random_matrix(gen, 2, 8)};
        sc.precoders = {random_matrix(gen, 8, 1), arma::cx_mat(8, 1, arma::fill::zeros)};
        arma::vec out = sinr(sc);
        const double expect =
            std::pow(arma::norm(sc.channels[0] * sc.precoders[0], "fro"), 2) / 0.5;
        REQUIRE(out(0) == Catch::Approx(expect).margin(1e-12));
    }

    SECTION("rank-1 matched filtering combines two equal TRPs coherently")
    {
        rng gen(43);
        arma::cx_mat h = random_matrix(gen, 1, 4);
        arma::cx_mat h_cjt = arma::join_rows(h, h); // two identical TRPs

        arma::cx_mat p_single = h.t() / arma::norm(h, "fro");
        arma::cx_mat p_stacked(8, 1);
        p_stacked.rows(0, 3) = p_single;
        p_stacked.rows(4, 7) = p_single;

        sinr_scenario single{{h}, {p_single}, 1e-3, sinr_mode::single_trp};

        // unit total power: signal doubles (+3 dB) at equal noise
        sinr_scenario joint_total{{h_cjt},
                                  {arma::cx_mat(p_stacked / std::sqrt(2.0))},
                                  1e-3,
                                  sinr_mode::cjt};
        REQUIRE(sinr(joint_total)(0) / sinr(single)(0) == Catch::Approx(2.0).epsilon(1e-9));

        // per-TRP unit power (the drop-evaluation convention): signal grows 4x
        sinr_scenario joint_per_trp{{h_cjt}, {p_stacked}, 1e-3, sinr_mode::cjt};
        REQUIRE(sinr(joint_per_trp)(0) / sinr(single)(0) == Catch::Approx(4.0).epsilon(1e-9));
    }

    SECTION("zero-forcing precoders null the cross terms")
    {
        rng gen(44);
        arma::cx_mat h1 = random_matrix(gen, 1, 6);
        arma::cx_mat h2 = random_matrix(gen, 1, 6);
        arma::cx_mat g = arma::join_cols(h1, h2);
        arma::cx_mat pinv = g.t() * arma::inv(g * g.t()); // 6 x 2 zero-forcing
        arma::cx_mat p1 = pinv.col(0) / arma::norm(pinv.col(0));
        arma::cx_mat p2 = pinv.col(1) / arma::norm(pinv.col(1));

        REQUIRE(std::pow(arma::norm(h1 * p2, "fro"), 2) < 1e-18);
        REQUIRE(std::pow(arma::norm(h2 * p1, "fro"), 2) < 1e-18);

        sinr_scenario sc{{h1, h2}, {p1, p2}, 1e-2, sinr_mode::single_trp};
        arma::vec out = sinr(sc);
        REQUIRE(out(0) ==
                Catch::Approx(std::pow(arma::norm(h1 * p1, "fro"), 2) / 1e-2).epsilon(1e-9));
    }

    SECTION("SINR is invariant to a common unitary rotation of full-rank precoders")
    {
        rng gen(45);
        arma::cx_mat h1 = random_matrix(gen, 2, 6);
        arma::cx_mat h2 = random_matrix(gen, 2, 6);
        arma::cx_mat p1 = random_matrix(gen, 6, 2);
        arma::cx_mat p2 = random_matrix(gen, 6, 2);

        // unitary 2x2 from the QR of a random matrix
        arma::cx_mat q, r;
        REQUIRE(arma::qr(q, r, random_matrix(gen, 2, 2)));

        sinr_scenario base{{h1, h2}, {p1, p2}, 0.3, sinr_mode::single_trp};
        sinr_scenario rotated{{h1, h2}, {p1 * q, p2 * q}, 0.3, sinr_mode::single_trp};
        arma::vec a = sinr(base), b = sinr(rotated);
        REQUIRE(a(0) == Catch::Approx(b(0)).epsilon(1e-9));
        REQUIRE(a(1) == Catch::Approx(b(1)).epsilon(1e-9));
    }
}

TEST_CASE("user perceived throughput")
{
    SECTION("one burst is a direct ratio")
    {
        REQUIRE(upt({{0.5e6, 0.1}}) == Catch::Approx(5e6).margin(1e-6));
    }

    SECTION("ratio of sums, not mean of ratios")
    {
        REQUIRE(upt({{1e6, 1.0}, {3e6, 1.0}}) == Catch::Approx(2e6).margin(1e-9));
    }

    SECTION("empty input is rejected")
    {
        REQUIRE_THROWS(upt({}));
    }

    SECTION("merge and permutation invariance")
    {
        rng gen(46);
        for (int trial = 0; trial < 100; ++trial)
        {
            std::vector<burst_record> bursts;
            const int n = 2 + int(gen.integer(6));
            for (int i = 0; i < n; ++i)
                bursts.push_back({gen.uniform(1e3, 1e7), gen.uniform(1e-3, 2.0)});
            const double base = upt(bursts);

            std::vector<burst_record> merged = bursts;
            burst_record joined{merged[0].size_bits + merged[1].size_bits,
                                merged[0].duration_s + merged[1].duration_s};
            merged.erase(merged.begin(), merged.begin() + 2);
            merged.push_back(joined);
            REQUIRE(upt(merged) == Catch::Approx(base).epsilon(1e-12));

            std::reverse(bursts.begin(), bursts.end());
            REQUIRE(upt(bursts) == Catch::Approx(base).epsilon(1e-12));
        }
    }
}

TEST_CASE("RSRP regions")
{
    REQUIRE(rsrp_region(2.0) == 1);
    REQUIRE(rsrp_region(12.0) == 3);
    REQUIRE(rsrp_region(20.0) == 4);
    REQUIRE(rsrp_region(0.0) == 1);
    REQUIRE(rsrp_region(3.0) == 2);  // boundaries go to the higher region
    REQUIRE(rsrp_region(10.0) == 3);
    REQUIRE(rsrp_region(15.0) == 4);
    REQUIRE_THROWS(rsrp_region(-0.1));

    // total monotone partition of [0, inf)
    int prev = 1;
    for (double gap = 0.0; gap < 40.0; gap += 0.01)
    {
        const int region = rsrp_region(gap);
        REQUIRE(region >= prev);
        REQUIRE((region >= 1 && region <= 4));
        prev = region;
    }
}

TEST_CASE("uplink precoding from weighted reference signals")
{
    SECTION("a single receive antenna gets the matched filter")
    {
        rng gen(47);
        arma::cx_mat h = random_matrix(gen, 1, 4);
        ul_precoder_result res = ul_precoder_weighted_csirs(h);
        REQUIRE(arma::norm(res.p_ul) == Catch::Approx(arma::norm(h, "fro")).margin(1e-10));
        // matched direction: w proportional to h^H
        arma::cx_vec matched = h.t() / arma::norm(h, "fro");
        REQUIRE(std::abs(arma::cdot(matched, res.w_dl)) == Catch::Approx(1.0).margin(1e-10));
    }

    SECTION("orthonormal rows scaled (3, 1) give gain 9")
    {
        arma::cx_mat h(2, 4, arma::fill::zeros);
        h(0, 0) = 3.0;
        h(1, 1) = 1.0;
        ul_precoder_result res = ul_precoder_weighted_csirs(h);
        REQUIRE(res.gain == Catch::Approx(9.0).margin(1e-10));
    }

    SECTION("achieved gain matches the SVD oracle and dominates random search")
    {
        rng gen(48);
        for (int trial = 0; trial < 5; ++trial)
        {
            arma::cx_mat h = random_matrix(gen, 2, 6);
            ul_precoder_result res = ul_precoder_weighted_csirs(h);
            arma::vec s = arma::svd(h);
            REQUIRE(res.gain == Catch::Approx(s(0) * s(0)).margin(1e-9));
            for (int probe = 0; probe < 10000; ++probe)
            {
                arma::cx_vec w = random_matrix(gen, 6, 1);
                w /= arma::norm(w);
                REQUIRE(std::pow(arma::norm(h * w), 2) <= res.gain + 1e-9);
            }
        }
    }

    SECTION("degenerate inputs are rejected")
    {
        REQUIRE_THROWS(ul_precoder_weighted_csirs(arma::cx_mat(2, 6, arma::fill::zeros)));
        rng gen(49);
        REQUIRE_THROWS(ul_precoder_weighted_csirs(random_matrix(gen, 4, 2)));
    }
}

TEST_CASE("cover-code port separation")
{
    SECTION("length-4 codes have an exactly identity Gram matrix")
    {
        for (arma::uword a = 0; a < 4; ++a)
            for (arma::uword b = 0; b < 4; ++b)
            {
                cx acc = 0.0;
                arma::cx_vec ca = occ_code(4, a), cb = occ_code(4, b);
                for (arma::uword i = 0; i < 4; ++i)
                    acc += ca(i) * std::conj(cb(i));
                acc /= 4.0;
                if (a == b)
                    REQUIRE(acc == cx(1.0, 0.0));
                else
                    REQUIRE(acc == cx(0.0, 0.0));
            }
    }

    SECTION("length-2 codes are the Hadamard pair")
    {
        REQUIRE(occ_code(2, 0)(1) == cx(1.0, 0.0));
        REQUIRE(occ_code(2, 1)(1) == cx(-1.0, 0.0));
    }

    SECTION("24 flat-channel ports recover exactly with zero leakage")
    {
        occ_config cfg;
        cfg.occ_length = 4;
        REQUIRE(cfg.total_ports() == 24);
        rng gen(50);
        std::vector<arma::cx_vec> channels;
        std::vector<cx> truth;
        const arma::uword sc_count = cfg.groups() * cfg.occ_length * 8;
        for (arma::uword port = 0; port < 24; ++port)
        {
            const cx value = gen.cx_gaussian();
            truth.push_back(value);
            channels.push_back(arma::cx_vec(sc_count, arma::fill::value(value)));
        }
        occ_result res = occ_port_estimation(cfg, channels);
        REQUIRE(res.leakage_ratio == 0.0);
        for (arma::uword port = 0; port < 24; ++port)
            for (arma::uword b = 0; b < res.estimates.n_cols; ++b)
                REQUIRE(std::abs(res.estimates(port, b) - truth[port]) < 1e-14);
    }

    SECTION("leakage appears with frequency selectivity and grows with delay spread")
    {
        occ_config cfg;
        cfg.occ_length = 4;
        const double comb = double(cfg.groups());
        const double sc = 30e3;
        // threshold delay spread: 1 / (4 * subcarrier spacing * comb)
        const double knee = 1.0 / (4.0 * sc * comb);

        rng gen(51);
        double prev = -1.0;
        for (double spread : {0.05 * knee, 0.3 * knee, 1.0 * knee, 3.0 * knee, 10.0 * knee})
        {
            double mean = 0.0;
            rng local(777); // common channels across sweep points differ only in spread
            for (int d = 0; d < 40; ++d)
                mean += occ_port_estimation(cfg, spread, local, 16, sc).leakage_ratio;
            mean /= 40.0;
            REQUIRE(mean > prev);
            prev = mean;
        }
        REQUIRE(prev > 0.01); // clearly nonzero beyond the knee
    }
}

TEST_CASE("drop pipeline")
{
    drop_params params;
    params.trp_count = 2;
    params.ue_count = 1;
    params.ue_antennas = 1;
    params.grid.units = 4;
    params.clusters.paths_min = 2;
    params.clusters.paths_max = 4;

    SECTION("single UE, single TRP, ideal feedback follows the direct formula")
    {
        drop_params solo = params;
        solo.trp_count = 1;
        rng gen(52);
        drop_scenario sc = make_drop_scenario(solo, gen);
        drop_result res = run_drop(sc, feedback_mode::ideal, sinr_mode::single_trp);

        // rank-1 ideal transmission: SE = mean over units of capped
        // log2(1 + ||h_f||^2 / n), with h_f the per-unit channel row
        double se = 0.0;
        for (arma::uword f = 0; f < solo.grid.units; ++f)
        {
            const double gain = std::pow(arma::norm(sc.links[0][0][0].matrix.col(f)), 2);
            se += se_from_sinr(gain / solo.noise_power);
        }
        se /= double(solo.grid.units);
        REQUIRE(res.ues[0].se == Catch::Approx(se).epsilon(1e-9));
    }

    SECTION("joint transmission beats the best single TRP for close gaps")
    {
        rng gen(53);
        drop_params region1 = params;
        region1.region1_max_gap_db = 3.0;
        int wins = 0;
        const int drops = 25;
        for (int d = 0; d < drops; ++d)
        {
            drop_scenario sc = make_drop_scenario(region1, gen);
            const double joint = run_drop(sc, feedback_mode::ideal, sinr_mode::cjt).ues[0].sinr_linear;
            double best_single = 0.0;
            for (int t = 0; t < 2; ++t)
                best_single = std::max(
                    best_single,
                    run_drop(sc, feedback_mode::ideal, sinr_mode::single_trp, t).ues[0].sinr_linear);
            if (joint >= best_single)
                ++wins;
        }
        REQUIRE(wins == drops); // coherent combining with per-TRP power never loses
    }

    SECTION("ideal feedback never trails quantized feedback for a single UE")
    {
        rng gen(54);
        for (int d = 0; d < 10; ++d)
        {
            drop_scenario sc = make_drop_scenario(params, gen);
            const double ideal =
                run_drop(sc, feedback_mode::ideal, sinr_mode::single_trp).ues[0].se;
            for (feedback_mode fb :
                 {feedback_mode::type1, feedback_mode::etype2, feedback_mode::cjt_codebook})
                REQUIRE(ideal >= run_drop(sc, fb, sinr_mode::single_trp).ues[0].se - 1e-12);
        }
    }

    SECTION("joint codebook feedback still combines coherently on average")
    {
        rng gen(56);
        drop_params region1 = params;
        region1.region1_max_gap_db = 3.0;
        double joint_db = 0.0, single_db = 0.0;
        const int drops = 15;
        for (int d = 0; d < drops; ++d)
        {
            drop_scenario sc = make_drop_scenario(region1, gen);
            joint_db += 10.0 * std::log10(
                            run_drop(sc, feedback_mode::cjt_codebook, sinr_mode::cjt)
                                .ues[0]
                                .sinr_linear);
            single_db += 10.0 * std::log10(
                             run_drop(sc, feedback_mode::cjt_codebook, sinr_mode::single_trp)
                                 .ues[0]
                                 .sinr_linear);
        }
        REQUIRE(joint_db / drops > single_db / drops);
    }

    SECTION("UPT summary uses the ratio of sums")
    {
        rng gen(55);
        drop_params two = params;
        two.ue_count = 2;
        drop_scenario sc = make_drop_scenario(two, gen);
        drop_result res = run_drop(sc, feedback_mode::ideal, sinr_mode::cjt);
        const double expect = (res.ues[0].se + res.ues[1].se) * 20e6 * 0.1 / 0.2;
        REQUIRE(res.upt_bits_per_s == Catch::Approx(expect).epsilon(1e-9));
    }
}
