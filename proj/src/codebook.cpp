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

#include "mimosim/codebook.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mimosim
{
    constexpr double pi = 3.141592653589793238462643;

    // ------------------------------------------------------------ selection

    namespace
    {
        // Indices of the n largest entries, ties to the lower index,
        // returned in ascending order.
        arma::uvec top_indices(const arma::vec& power, arma::uword n)
        {
            if (n > power.n_elem)
                throw std::invalid_argument("selection count exceeds basis size");
            std::vector<arma::uword> idx(power.n_elem);
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(),
                             [&](arma::uword a, arma::uword b) { return power(a) > power(b); });
            idx.resize(n);
            std::sort(idx.begin(), idx.end());
            return arma::uvec(idx);
        }

        arma::vec spatial_powers(const arma::cx_mat& h, const arma::cx_mat& basis)
        {
            arma::cx_mat proj = basis.t() * h;
            return arma::sum(arma::square(arma::abs(proj)), 1);
        }

        arma::vec freq_powers(const arma::cx_mat& h, const arma::cx_mat& basis)
        {
            arma::cx_mat proj = h * basis;
            return arma::sum(arma::square(arma::abs(proj)), 0).t();
        }

        // L beams per polarization block for block-diagonal bases, 2L overall
        // for unstructured (eigen) bases.
        arma::uvec select_spatial(const arma::vec& power, arma::uword beams_l,
                                  const array_config& array, basis_kind kind)
        {
            if (kind == basis_kind::dft && array.polarizations == 2)
            {
                const arma::uword block = power.n_elem / 2;
                if (beams_l > block)
                    throw std::invalid_argument("spatial beam count exceeds polarization block size");
                arma::uvec lo = top_indices(power.subvec(0, block - 1), beams_l);
                arma::uvec hi = top_indices(power.subvec(block, 2 * block - 1), beams_l) + block;
                return arma::join_cols(lo, hi);
            }
            if (2 * beams_l > power.n_elem)
                throw std::invalid_argument("spatial beam count exceeds basis size");
            return top_indices(power, 2 * beams_l);
        }

        // Strongest top_k coefficients of c, ties broken by lowest (row, col);
        // kept in row-major order.
        std::vector<report_coeff> strongest_coeffs(const arma::cx_mat& c, arma::uword top_k)
        {
            struct entry
            {
                arma::uword row, col;
                double power;
            };
            std::vector<entry> entries;
            entries.reserve(c.n_elem);
            for (arma::uword r = 0; r < c.n_rows; ++r)
                for (arma::uword col = 0; col < c.n_cols; ++col)
                    entries.push_back({r, col, std::norm(c(r, col))});
            std::stable_sort(entries.begin(), entries.end(),
                             [](const entry& a, const entry& b) { return a.power > b.power; });
            entries.resize(std::min<std::size_t>(top_k, entries.size()));
            std::sort(entries.begin(), entries.end(), [](const entry& a, const entry& b) {
                return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
            std::vector<report_coeff> out;
            out.reserve(entries.size());
            for (const auto& e : entries)
                out.push_back({e.row, e.col, c(e.row, e.col)});
            return out;
        }

        report_block compress_block(const arma::cx_mat& h, const basis_pair& basis,
                                    const arma::uvec& spatial_sel, const arma::uvec& freq_sel,
                                    arma::uword top_k)
        {
            report_block block;
            block.spatial_cols = spatial_sel;
            block.freq_cols = freq_sel;
            arma::cx_mat c =
                basis.spatial.cols(spatial_sel).t() * h * basis.frequency.cols(freq_sel);
            block.coeffs = strongest_coeffs(c, top_k);
            return block;
        }
    } // namespace

    arma::cx_mat report_block::dense_coeff_matrix() const
    {
        const arma::uword cols =
            freq_cols.n_elem * std::max<arma::uword>(1, time_cols.n_elem);
        arma::cx_mat c(spatial_cols.n_elem, cols, arma::fill::zeros);
        for (const auto& e : coeffs)
            c(e.row, e.col) = e.value;
        return c;
    }

    bool reports_equal(const precoder_report& a, const precoder_report& b)
    {
        if (a.ports != b.ports || a.freq_units != b.freq_units || a.layers != b.layers ||
            a.slots != b.slots || a.group_size != b.group_size || a.quant != b.quant ||
            a.blocks.size() != b.blocks.size())
            return false;
        for (std::size_t i = 0; i < a.blocks.size(); ++i)
        {
            const auto& x = a.blocks[i];
            const auto& y = b.blocks[i];
            if (x.trp != y.trp || x.layer != y.layer || x.scale != y.scale ||
                x.coeffs.size() != y.coeffs.size() ||
                !std::equal(x.spatial_cols.begin(), x.spatial_cols.end(), y.spatial_cols.begin(),
                            y.spatial_cols.end()) ||
                !std::equal(x.freq_cols.begin(), x.freq_cols.end(), y.freq_cols.begin(),
                            y.freq_cols.end()) ||
                !std::equal(x.time_cols.begin(), x.time_cols.end(), y.time_cols.begin(),
                            y.time_cols.end()))
                return false;
            for (std::size_t k = 0; k < x.coeffs.size(); ++k)
                if (x.coeffs[k].row != y.coeffs[k].row || x.coeffs[k].col != y.coeffs[k].col ||
                    x.coeffs[k].value != y.coeffs[k].value)
                    return false;
        }
        return true;
    }

    // -------------------------------------------------------------- quantizer

    precoder_report quantize_report(const precoder_report& report, quantizer q)
    {
        precoder_report out = report;
        if (q == quantizer::none)
        {
            out.quant = q;
            return out;
        }
        for (auto& block : out.blocks)
        {
            if (block.coeffs.empty())
                continue;
            // The normalizer is part of the quantized representation: reuse it
            // when requantizing so the grid is an exact fixed point.
            double scale = 0.0;
            if (report.quant != quantizer::none && block.scale > 0.0)
                scale = block.scale;
            else
                for (const auto& e : block.coeffs)
                    scale = std::max(scale, std::abs(e.value));
            block.scale = scale;
            for (auto& e : block.coeffs)
            {
                if (scale == 0.0)
                {
                    e.value = 0.0;
                    continue;
                }
                const double a = std::abs(e.value) / scale;
                long level = 0;
                if (a > 0.0)
                    level = std::lround(20.0 * std::log10(a) / -1.5);
                else
                    level = 7;
                level = std::clamp(level, 0L, 7L);
                const double amp = std::pow(10.0, -1.5 * static_cast<double>(level) / 20.0);
                long ph = std::lround(std::arg(e.value) / (2.0 * pi / 16.0));
                ph = ((ph % 16) + 16) % 16;
                e.value = std::polar(scale * amp, 2.0 * pi * static_cast<double>(ph) / 16.0);
            }
        }
        out.quant = q;
        return out;
    }

    // ----------------------------------------------------------- serialization

    namespace
    {
        std::string fmt(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return buf;
        }

        void write_indices(std::ostringstream& os, const char* name, const arma::uvec& v)
        {
            os << name;
            for (arma::uword i = 0; i < v.n_elem; ++i)
                os << ' ' << v(i);
            os << '\n';
        }
    } // namespace

    std::string serialize_report(const precoder_report& report)
    {
        std::ostringstream os;
        os << "report ports=" << report.ports << " units=" << report.freq_units
           << " layers=" << report.layers << " slots=" << report.slots
           << " group=" << report.group_size << " quant=" << static_cast<int>(report.quant)
           << '\n';
        for (const auto& block : report.blocks)
        {
            os << "block trp=" << block.trp << " layer=" << block.layer
               << " scale=" << fmt(block.scale) << '\n';
            write_indices(os, "spatial", block.spatial_cols);
            write_indices(os, "freq", block.freq_cols);
            if (block.time_cols.n_elem > 0)
                write_indices(os, "time", block.time_cols);
            for (const auto& e : block.coeffs)
                os << block.trp << ' ' << e.row << ' ' << e.col << ' ' << fmt(e.value.real())
                   << ' ' << fmt(e.value.imag()) << '\n';
        }
        os << "end\n";
        return os.str();
    }

    precoder_report parse_report(const std::string& text)
    {
        precoder_report report;
        std::istringstream is(text);
        std::string line;
        bool have_header = false;
        auto parse_kv = [](const std::string& token, const char* key) {
            const std::string prefix = std::string(key) + "=";
            if (token.rfind(prefix, 0) != 0)
                throw std::invalid_argument("parse_report: expected " + prefix + " got " + token);
            return token.substr(prefix.size());
        };
        while (std::getline(is, line))
        {
            if (line.empty())
                continue;
            std::istringstream ls(line);
            if (std::isdigit(static_cast<unsigned char>(line[0])))
            {
                if (report.blocks.empty())
                    throw std::invalid_argument("parse_report: coefficient before any block");
                arma::uword trp, row, col;
                double re, im;
                if (!(ls >> trp >> row >> col >> re >> im))
                    throw std::invalid_argument("parse_report: bad coefficient line: " + line);
                if (trp != report.blocks.back().trp)
                    throw std::invalid_argument("parse_report: coefficient TRP does not match block");
                report.blocks.back().coeffs.push_back({row, col, cx(re, im)});
                continue;
            }
            std::string tag;
            ls >> tag;
            if (tag == "report")
            {
                std::string tok;
                ls >> tok;
                report.ports = std::stoull(parse_kv(tok, "ports"));
                ls >> tok;
                report.freq_units = std::stoull(parse_kv(tok, "units"));
                ls >> tok;
                report.layers = std::stoull(parse_kv(tok, "layers"));
                ls >> tok;
                report.slots = std::stoull(parse_kv(tok, "slots"));
                ls >> tok;
                report.group_size = std::stoull(parse_kv(tok, "group"));
                ls >> tok;
                report.quant = static_cast<quantizer>(std::stoi(parse_kv(tok, "quant")));
                have_header = true;
            }
            else if (tag == "block")
            {
                std::string tok;
                report_block block;
                ls >> tok;
                block.trp = std::stoull(parse_kv(tok, "trp"));
                ls >> tok;
                block.layer = std::stoull(parse_kv(tok, "layer"));
                ls >> tok;
                block.scale = std::stod(parse_kv(tok, "scale"));
                report.blocks.push_back(block);
            }
            else if (tag == "spatial" || tag == "freq" || tag == "time")
            {
                if (report.blocks.empty())
                    throw std::invalid_argument("parse_report: indices before any block");
                std::vector<arma::uword> vals;
                arma::uword v;
                while (ls >> v)
                    vals.push_back(v);
                arma::uvec u(vals);
                if (tag == "spatial")
                    report.blocks.back().spatial_cols = u;
                else if (tag == "freq")
                    report.blocks.back().freq_cols = u;
                else
                    report.blocks.back().time_cols = u;
            }
            else if (tag == "end")
                break;
            else
                throw std::invalid_argument("parse_report: unknown line: " + line);
        }
        if (!have_header)
            throw std::invalid_argument("parse_report: missing report header");
        for (const auto& block : report.blocks)
        {
            // grid-of-beams reports index an oversampled grid; others index
            // the square bases directly
            if (report.group_size == 0 && block.spatial_cols.n_elem > 0 &&
                block.spatial_cols.max() >= report.ports)
                throw std::invalid_argument("parse_report: spatial index out of range");
            if (block.freq_cols.n_elem > 0 && block.freq_cols.max() >= report.freq_units)
                throw std::invalid_argument("parse_report: frequency index out of range");
            if (block.time_cols.n_elem > 0 && block.time_cols.max() >= report.slots)
                throw std::invalid_argument("parse_report: time index out of range");
        }
        return report;
    }

    // ---------------------------------------------------------------- Type I

    void type1_config::validate() const
    {
        array.validate();
        if (beams_in_group != 1 && beams_in_group != 4)
            throw std::invalid_argument("type1_config: beams_in_group must be 1 or 4");
        if (oversampling < 1)
            throw std::invalid_argument("type1_config: oversampling must be >= 1");
        if (cophase_levels < 1)
            throw std::invalid_argument("type1_config: cophase_levels must be >= 1");
    }

    arma::uword type1_config::beam_count() const
    {
        return oversampling * array.ports_vertical * oversampling * array.ports_horizontal;
    }

    namespace
    {
        // Oversampled 2D DFT beam over one polarization block
        arma::cx_vec type1_beam(const type1_config& cfg, arma::uword beam_id)
        {
            const arma::uword nv = cfg.oversampling * cfg.array.ports_vertical;
            const arma::uword nh = cfg.oversampling * cfg.array.ports_horizontal;
            const arma::uword k1 = beam_id / nh;
            const arma::uword k2 = beam_id % nh;
            const arma::uword block = cfg.array.ports_vertical * cfg.array.ports_horizontal;
            arma::cx_vec b(block);
            const double scale = 1.0 / std::sqrt(static_cast<double>(block));
            for (arma::uword m = 0; m < cfg.array.ports_vertical; ++m)
                for (arma::uword n = 0; n < cfg.array.ports_horizontal; ++n)
                    b(m * cfg.array.ports_horizontal + n) = std::polar(
                        scale, 2.0 * pi * (static_cast<double>(m * k1) / static_cast<double>(nv) +
                                           static_cast<double>(n * k2) / static_cast<double>(nh)));
            return b;
        }

        // Beam ids of the group rooted at beam_id (1 or 4 adjacent beams)
        std::vector<arma::uword> type1_group(const type1_config& cfg, arma::uword beam_id)
        {
            if (cfg.beams_in_group == 1)
                return {beam_id};
            const arma::uword nv = cfg.oversampling * cfg.array.ports_vertical;
            const arma::uword nh = cfg.oversampling * cfg.array.ports_horizontal;
            const arma::uword k1 = beam_id / nh;
            const arma::uword k2 = beam_id % nh;
            const arma::uword k1n = (k1 + cfg.oversampling) % nv;
            const arma::uword k2n = (k2 + cfg.oversampling) % nh;
            return {k1 * nh + k2, k1 * nh + k2n, k1n * nh + k2, k1n * nh + k2n};
        }

        arma::cx_vec type1_codeword(const type1_config& cfg, arma::uword beam_id, cx cophase)
        {
            const arma::uword block = cfg.array.ports_vertical * cfg.array.ports_horizontal;
            arma::cx_vec b = type1_beam(cfg, beam_id);
            if (cfg.array.polarizations == 1)
                return b;
            arma::cx_vec w(2 * block);
            const double s = 1.0 / std::sqrt(2.0);
            w.subvec(0, block - 1) = s * b;
            w.subvec(block, 2 * block - 1) = (s * cophase) * b;
            return w;
        }
    } // namespace

    type1_result type1_quantize(const channel_snapshot& snapshot, const type1_config& cfg)
    {
        cfg.validate();
        const arma::uword total = cfg.array.total_ports();
        if (snapshot.matrix.n_rows != total)
            throw std::invalid_argument("type1_quantize: snapshot rows do not match array ports");

        const arma::cx_mat r = snapshot.matrix * snapshot.matrix.t(); // P x P Gram
        double best = -1.0;
        arma::uword best_group = 0, best_slot = 0, best_phase = 0;

        for (arma::uword g = 0; g < cfg.beam_count(); ++g)
        {
            const auto members = type1_group(cfg, g);
            for (arma::uword slot = 0; slot < members.size(); ++slot)
                for (arma::uword q = 0; q < (cfg.array.polarizations == 2 ? cfg.cophase_levels : 1); ++q)
                {
                    const cx phase =
                        std::polar(1.0, 2.0 * pi * static_cast<double>(q) /
                                            static_cast<double>(cfg.cophase_levels));
                    const arma::cx_vec w = type1_codeword(cfg, members[slot], phase);
                    const double metric = std::real(arma::cdot(w, r * w));
                    if (metric > best)
                    {
                        best = metric;
                        best_group = g;
                        best_slot = slot;
                        best_phase = q;
                    }
                }
        }

        const auto members = type1_group(cfg, best_group);
        const cx phase = std::polar(
            1.0, 2.0 * pi * static_cast<double>(best_phase) / static_cast<double>(cfg.cophase_levels));

        type1_result out;
        out.report.ports = total;
        out.report.freq_units = snapshot.matrix.n_cols;
        out.report.group_size = cfg.beams_in_group;
        report_block block;
        block.spatial_cols = arma::uvec(std::vector<arma::uword>(members.begin(), members.end()));
        if (cfg.array.polarizations == 2)
        {
            const double s = 1.0 / std::sqrt(2.0);
            block.coeffs.push_back({best_slot, 0, cx(s, 0.0)});
            block.coeffs.push_back({cfg.beams_in_group + best_slot, 0, s * phase});
        }
        else
            block.coeffs.push_back({best_slot, 0, cx(1.0, 0.0)});
        out.report.blocks.push_back(block);
        out.beamformer = type1_reconstruct(out.report, cfg);
        out.metric = std::sqrt(std::max(0.0, best));
        return out;
    }

    arma::cx_vec type1_reconstruct(const precoder_report& report, const type1_config& cfg)
    {
        if (report.group_size == 0 || report.blocks.empty())
            throw std::invalid_argument("type1_reconstruct: not a grid-of-beams report");
        const auto& block = report.blocks.front();
        const arma::uword bsize = cfg.array.ports_vertical * cfg.array.ports_horizontal;
        arma::cx_vec w(cfg.array.total_ports(), arma::fill::zeros);
        for (const auto& e : block.coeffs)
        {
            const arma::uword pol = e.row / report.group_size;
            const arma::uword slot = e.row % report.group_size;
            const arma::cx_vec b = type1_beam(cfg, block.spatial_cols(slot));
            w.subvec(pol * bsize, (pol + 1) * bsize - 1) += e.value * b;
        }
        return w;
    }

    // --------------------------------------------------- frequency compression

    arma::uword etype2_config::derive_z(double p, arma::uword f, arma::uword phi)
    {
        if (p <= 0.0 || phi == 0)
            throw std::invalid_argument("etype2_config: fraction and units_per_subframe must be > 0");
        return static_cast<arma::uword>(
            std::ceil(p * static_cast<double>(f) / static_cast<double>(phi)));
    }

    arma::uword etype2_config::effective_z() const
    {
        return fraction_p > 0.0 ? derive_z(fraction_p, freq_units_F, units_per_subframe)
                                : delay_dim_Z;
    }

    void etype2_config::validate_dims(const array_config& array) const
    {
        array.validate();
        if (layers < 1 || layers > 8)
            throw std::invalid_argument("etype2_config: layers must be in [1, 8]");
        if (freq_units_F < 1)
            throw std::invalid_argument("etype2_config: freq_units_F must be >= 1");
        const arma::uword z = effective_z();
        if (z < 1 || z > freq_units_F)
            throw std::invalid_argument("etype2_config: delay dimension must be in [1, F]");
        if (2 * beams_L > array.total_ports())
            throw std::invalid_argument("etype2_config: beam count exceeds port count");
    }

    void etype2_config::validate(const array_config& array) const
    {
        validate_dims(array);
        if (top_K > 2 * beams_L * effective_z())
            throw std::invalid_argument("etype2_config: top_K exceeds available coefficients");
    }

    precoder_report etype2_compress(const std::vector<arma::cx_mat>& layer_precoders,
                                    const etype2_config& cfg, const array_config& array)
    {
        cfg.validate(array);
        if (layer_precoders.empty() || layer_precoders.size() != cfg.layers)
            throw std::invalid_argument("etype2_compress: layer count does not match config");
        const arma::uword p = array.total_ports();
        const arma::uword f = cfg.freq_units_F;
        for (const auto& w : layer_precoders)
            if (w.n_rows != p || w.n_cols != f)
                throw std::invalid_argument("etype2_compress: precoder dimensions do not match config");
        const arma::uword z = cfg.effective_z();

        const basis_pair basis = dft_basis(array, f);

        // Spatial beams are shared across layers
        arma::vec spower(p, arma::fill::zeros);
        for (const auto& w : layer_precoders)
            spower += spatial_powers(w, basis.spatial);
        const arma::uvec ssel = select_spatial(spower, cfg.beams_L, array, basis.kind);

        precoder_report report;
        report.ports = p;
        report.freq_units = f;
        report.layers = cfg.layers;
        for (arma::uword layer = 0; layer < cfg.layers; ++layer)
        {
            const arma::uvec fsel = top_indices(freq_powers(layer_precoders[layer], basis.frequency), z);
            report_block block = compress_block(layer_precoders[layer], basis, ssel, fsel, cfg.top_K);
            block.layer = layer;
            report.blocks.push_back(std::move(block));
        }
        return report;
    }

    arma::cx_mat etype2_reconstruct_full(const precoder_report& report, const etype2_config& cfg,
                                         const array_config& array, arma::uword layer)
    {
        (void)cfg;
        const basis_pair basis = dft_basis(array, report.freq_units);
        for (const auto& block : report.blocks)
            if (block.layer == layer)
                return basis.spatial.cols(block.spatial_cols) * block.dense_coeff_matrix() *
                       basis.frequency.cols(block.freq_cols).t();
        throw std::invalid_argument("etype2_reconstruct_full: no such layer");
    }

    arma::cx_mat etype2_reconstruct(const precoder_report& report, const etype2_config& cfg,
                                    const array_config& array, arma::uword x)
    {
        (void)cfg;
        if (x >= report.freq_units)
            throw std::invalid_argument("etype2_reconstruct: frequency unit out of range");
        const basis_pair basis = dft_basis(array, report.freq_units);
        arma::cx_mat w(report.ports, report.layers, arma::fill::zeros);
        for (const auto& block : report.blocks)
        {
            // column x of C * F_sel^H is C * conj(F_sel(x, :))^T
            const arma::cx_mat fsub = basis.frequency.cols(block.freq_cols);
            const arma::cx_vec fx = arma::conj(fsub.row(x)).st();
            w.col(block.layer) =
                basis.spatial.cols(block.spatial_cols) * (block.dense_coeff_matrix() * fx);
        }
        return w;
    }

    // ------------------------------------------------------------- multi-TRP

    void cjt_config::validate() const
    {
        per_trp_array.validate();
        if (trp_count < 1)
            throw std::invalid_argument("cjt_config: trp_count must be >= 1");
        if (per_trp_beams.size() != trp_count || per_trp_freq.size() != trp_count ||
            per_trp_topk.size() != trp_count)
            throw std::invalid_argument("cjt_config: per-TRP lists must have trp_count entries");
        for (arma::uword n = 0; n < trp_count; ++n)
        {
            if (per_trp_topk[n] > 2 * per_trp_beams[n] * per_trp_freq[n])
                throw std::invalid_argument("cjt_config: K_n exceeds available coefficients");
            if (joint_frequency_basis && per_trp_freq[n] != per_trp_freq[0])
                throw std::invalid_argument("cjt_config: joint mode requires equal M_n");
        }
    }

    precoder_report cjt_compress(const arma::cx_mat& h_stacked, const cjt_config& cfg,
                                 const std::vector<basis_pair>& bases)
    {
        cfg.validate();
        const arma::uword p = cfg.per_trp_array.total_ports();
        if (h_stacked.n_rows != cfg.trp_count * p)
            throw std::invalid_argument("cjt_compress: stacked rows do not match trp_count * ports");
        if (bases.size() != cfg.trp_count)
            throw std::invalid_argument("cjt_compress: one basis pair per TRP required");

        const arma::uword nf = h_stacked.n_cols;

        arma::uvec joint_fsel;
        if (cfg.joint_frequency_basis)
        {
            arma::vec fpower(nf, arma::fill::zeros);
            for (arma::uword n = 0; n < cfg.trp_count; ++n)
                fpower += freq_powers(h_stacked.rows(n * p, (n + 1) * p - 1), bases[0].frequency);
            joint_fsel = top_indices(fpower, cfg.per_trp_freq[0]);
        }

        precoder_report report;
        report.ports = p;
        report.freq_units = nf;
        for (arma::uword n = 0; n < cfg.trp_count; ++n)
        {
            const arma::cx_mat h = h_stacked.rows(n * p, (n + 1) * p - 1);
            const basis_pair& basis = cfg.joint_frequency_basis ? bases[0] : bases[n];
            const arma::uvec ssel = select_spatial(spatial_powers(h, bases[n].spatial),
                                                   cfg.per_trp_beams[n], cfg.per_trp_array,
                                                   bases[n].kind);
            const arma::uvec fsel = cfg.joint_frequency_basis
                                        ? joint_fsel
                                        : top_indices(freq_powers(h, basis.frequency),
                                                      cfg.per_trp_freq[n]);
            basis_pair mixed;
            mixed.spatial = bases[n].spatial;
            mixed.frequency = basis.frequency;
            report_block block = compress_block(h, mixed, ssel, fsel, cfg.per_trp_topk[n]);
            block.trp = n;
            report.blocks.push_back(std::move(block));
        }
        return report;
    }

    arma::cx_mat cjt_reconstruct(const precoder_report& report, const cjt_config& cfg,
                                 const std::vector<basis_pair>& bases)
    {
        const arma::uword p = cfg.per_trp_array.total_ports();
        arma::cx_mat w(cfg.trp_count * p, report.freq_units, arma::fill::zeros);
        for (const auto& block : report.blocks)
        {
            const basis_pair& sb = bases.at(block.trp);
            const basis_pair& fb = cfg.joint_frequency_basis ? bases[0] : bases.at(block.trp);
            w.rows(block.trp * p, (block.trp + 1) * p - 1) =
                sb.spatial.cols(block.spatial_cols) * block.dense_coeff_matrix() *
                fb.frequency.cols(block.freq_cols).t();
        }
        return w;
    }

    // ------------------------------------------------------------ power ratio

    double power_ratio(const channel_snapshot& snapshot, const basis_pair& basis, arma::uword k)
    {
        if (k > snapshot.matrix.n_elem)
            throw std::invalid_argument("power_ratio: K exceeds coefficient count");
        arma::cx_mat c = basis.spatial.t() * snapshot.matrix * basis.frequency;
        arma::vec power = arma::sort(
            arma::vectorise(arma::square(arma::abs(c))), "descend");
        const double total = arma::accu(power);
        if (total <= 0.0)
            throw std::invalid_argument("undefined ratio");
        double kept = 0.0;
        for (arma::uword i = 0; i < k; ++i)
            kept += power(i);
        return kept / total;
    }

    // -------------------------------------------------------- Doppler domain

    void doppler_config::validate(const array_config& array) const
    {
        etype2.validate_dims(array);
        if (slots < 1)
            throw std::invalid_argument("doppler_config: slots must be >= 1");
        if (time_basis < 1 || time_basis > slots)
            throw std::invalid_argument("doppler_config: time_basis must be in [1, slots]");
        const arma::uword total = 2 * etype2.beams_L * etype2.effective_z() * time_basis;
        if (etype2.top_K > total)
            throw std::invalid_argument("doppler_config: top_K exceeds available coefficients");
    }

    precoder_report doppler_compress(const arma::cx_mat& predicted, const doppler_config& cfg,
                                     const array_config& array)
    {
        cfg.validate(array);
        const arma::uword p = array.total_ports();
        const arma::uword f = cfg.etype2.freq_units_F;
        const arma::uword s = cfg.slots;
        if (predicted.n_rows != p || predicted.n_cols != f * s)
            throw std::invalid_argument("doppler_compress: matrix dimensions do not match config");

        const basis_pair basis = dft_basis(array, f);
        const arma::cx_mat time_basis = dft_matrix(s);

        const arma::uvec ssel =
            select_spatial(spatial_powers(predicted, basis.spatial), cfg.etype2.beams_L, array,
                           basis.kind);

        // frequency power summed over slots, time power summed over units
        arma::vec fpower(f, arma::fill::zeros);
        arma::vec tpower(s, arma::fill::zeros);
        for (arma::uword slot = 0; slot < s; ++slot)
        {
            arma::cx_mat h_slot(p, f);
            for (arma::uword unit = 0; unit < f; ++unit)
                h_slot.col(unit) = predicted.col(unit * s + slot);
            fpower += freq_powers(h_slot, basis.frequency);
        }
        for (arma::uword unit = 0; unit < f; ++unit)
        {
            const arma::cx_mat h_unit = predicted.cols(unit * s, (unit + 1) * s - 1);
            tpower += freq_powers(h_unit, time_basis);
        }
        const arma::uvec fsel = top_indices(fpower, cfg.etype2.effective_z());
        const arma::uvec tsel = top_indices(tpower, cfg.time_basis);

        const arma::cx_mat joint = arma::kron(basis.frequency.cols(fsel), time_basis.cols(tsel));
        const arma::cx_mat c = basis.spatial.cols(ssel).t() * predicted * joint;

        precoder_report report;
        report.ports = p;
        report.freq_units = f;
        report.slots = s;
        report_block block;
        block.spatial_cols = ssel;
        block.freq_cols = fsel;
        block.time_cols = tsel;
        block.coeffs = strongest_coeffs(c, cfg.etype2.top_K);
        report.blocks.push_back(std::move(block));
        return report;
    }

    arma::cx_mat doppler_reconstruct(const precoder_report& report, const doppler_config& cfg,
                                     const array_config& array)
    {
        (void)cfg;
        if (report.blocks.empty())
            throw std::invalid_argument("doppler_reconstruct: empty report");
        const auto& block = report.blocks.front();
        const basis_pair basis = dft_basis(array, report.freq_units);
        const arma::cx_mat time_basis = dft_matrix(report.slots);
        const arma::cx_mat joint =
            arma::kron(basis.frequency.cols(block.freq_cols), time_basis.cols(block.time_cols));
        return basis.spatial.cols(block.spatial_cols) * block.dense_coeff_matrix() * joint.t();
    }

} // namespace mimosim
