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

#include "mimosim/channel.hpp"

#include <stdexcept>

#include "mimosim/parallel.hpp"

namespace mimosim
{
    constexpr double pi = 3.141592653589793238462643;

    void array_config::validate() const
    {
        if (ports_vertical < 1 || ports_horizontal < 1)
            throw std::invalid_argument("array_config: port counts must be >= 1");
        if (polarizations != 1 && polarizations != 2)
            throw std::invalid_argument("array_config: polarizations must be 1 or 2");
        if (!(spacing_v > 0.0) || !(spacing_h > 0.0))
            throw std::invalid_argument("array_config: spacings must be > 0");
    }

    void frequency_grid::validate() const
    {
        if (units < 1)
            throw std::invalid_argument("frequency_grid: units must be >= 1");
        if (!(unit_spacing_hz > 0.0))
            throw std::invalid_argument("frequency_grid: unit_spacing_hz must be > 0");
        if (subcarriers_per_unit < 1)
            throw std::invalid_argument("frequency_grid: subcarriers_per_unit must be >= 1");
    }

    double basis_pair::unitarity_error() const
    {
        double e_s = arma::abs(spatial.t() * spatial -
                               arma::cx_mat(arma::eye(spatial.n_cols, spatial.n_cols),
                                            arma::mat(spatial.n_cols, spatial.n_cols, arma::fill::zeros)))
                         .max();
        double e_f = arma::abs(frequency.t() * frequency -
                               arma::cx_mat(arma::eye(frequency.n_cols, frequency.n_cols),
                                            arma::mat(frequency.n_cols, frequency.n_cols, arma::fill::zeros)))
                         .max();
        return std::max(e_s, e_f);
    }

    arma::cx_vec steering_vector(double azimuth, double zenith, const array_config& array)
    {
        array.validate();
        const arma::uword block = array.ports_vertical * array.ports_horizontal;
        const arma::uword total = array.total_ports();
        arma::cx_vec a(total);

        const double ky = std::sin(zenith) * std::sin(azimuth); // horizontal axis
        const double kz = std::cos(zenith);                     // vertical axis
        const double scale = 1.0 / std::sqrt(static_cast<double>(total));

        for (arma::uword m = 0; m < array.ports_vertical; ++m)
            for (arma::uword n = 0; n < array.ports_horizontal; ++n)
            {
                const double proj = static_cast<double>(n) * array.spacing_h * ky +
                                    static_cast<double>(m) * array.spacing_v * kz;
                const cx v = std::polar(scale, 2.0 * pi * proj);
                for (arma::uword p = 0; p < array.polarizations; ++p)
                    a(p * block + m * array.ports_horizontal + n) = v;
            }
        return a;
    }

    arma::cx_vec steering_vector_pol(double azimuth, double zenith, const array_config& array, int pol)
    {
        arma::cx_vec a = steering_vector(azimuth, zenith, array);
        if (pol < 0 || array.polarizations == 1)
            return a;
        if (pol > 1)
            throw std::invalid_argument("steering_vector_pol: pol must be -1, 0 or 1");
        const arma::uword block = array.ports_vertical * array.ports_horizontal;
        arma::cx_vec masked(a.n_elem, arma::fill::zeros);
        masked.subvec(static_cast<arma::uword>(pol) * block, (static_cast<arma::uword>(pol) + 1) * block - 1) =
            a.subvec(static_cast<arma::uword>(pol) * block, (static_cast<arma::uword>(pol) + 1) * block - 1);
        return masked * std::sqrt(2.0); // restore unit norm
    }

    arma::cx_vec delay_vector(double delay_s, const frequency_grid& grid)
    {
        grid.validate();
        arma::cx_vec d(grid.units);
        for (arma::uword f = 0; f < grid.units; ++f)
            d(f) = std::polar(1.0, -2.0 * pi * static_cast<double>(f) * grid.unit_spacing_hz * delay_s);
        return d;
    }

    namespace
    {
        // Per-entry path sum shared by the parallel and serial versions so both
        // produce bit-identical results.
        struct synth_work
        {
            const std::vector<path_cluster>& paths;
            std::vector<arma::cx_vec> steer;
            std::vector<cx> time_phasor;
            const frequency_grid& grid;

            synth_work(const std::vector<path_cluster>& p, double t, const array_config& array,
                       const frequency_grid& g)
                : paths(p), grid(g)
            {
                steer.reserve(p.size());
                time_phasor.reserve(p.size());
                for (const auto& path : p)
                {
                    steer.push_back(steering_vector_pol(path.azimuth, path.zenith, array, path.pol));
                    time_phasor.push_back(path.gain *
                                          std::polar(1.0, 2.0 * pi * path.doppler_hz * t));
                }
            }

            cx entry(arma::uword port, arma::uword unit) const
            {
                cx acc = 0.0;
                for (std::size_t i = 0; i < paths.size(); ++i)
                {
                    const cx delay = std::polar(
                        1.0, -2.0 * pi * static_cast<double>(unit) * grid.unit_spacing_hz * paths[i].delay_s);
                    acc += time_phasor[i] * steer[i](port) * delay;
                }
                return acc;
            }
        };
    } // namespace

    channel_snapshot synthesize_channel(const std::vector<path_cluster>& paths, double t,
                                        const array_config& array, const frequency_grid& grid)
    {
        array.validate();
        grid.validate();
        const arma::uword P = array.total_ports();
        channel_snapshot snap;
        snap.time_s = t;
        snap.matrix.set_size(P, grid.units);
        if (paths.empty())
        {
            snap.matrix.zeros();
            return snap;
        }
        synth_work work(paths, t, array, grid);
        const std::size_t n = static_cast<std::size_t>(P) * grid.units;
        const bool small = n < parallel_grain;
        parallel_for(
            n,
            [&](std::size_t k) {
                const arma::uword port = static_cast<arma::uword>(k) % P;
                const arma::uword unit = static_cast<arma::uword>(k) / P;
                snap.matrix(port, unit) = work.entry(port, unit);
            },
            small);
        return snap;
    }

    channel_snapshot synthesize_channel_serial(const std::vector<path_cluster>& paths, double t,
                                               const array_config& array, const frequency_grid& grid)
    {
        array.validate();
        grid.validate();
        const arma::uword P = array.total_ports();
        channel_snapshot snap;
        snap.time_s = t;
        snap.matrix.set_size(P, grid.units);
        if (paths.empty())
        {
            snap.matrix.zeros();
            return snap;
        }
        synth_work work(paths, t, array, grid);
        for (arma::uword unit = 0; unit < grid.units; ++unit)
            for (arma::uword port = 0; port < P; ++port)
                snap.matrix(port, unit) = work.entry(port, unit);
        return snap;
    }

    arma::cx_mat dft_matrix(arma::uword n)
    {
        arma::cx_mat f(n, n);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        for (arma::uword j = 0; j < n; ++j)
            for (arma::uword k = 0; k < n; ++k)
                f(j, k) = std::polar(scale, -2.0 * pi * static_cast<double>(j * k % n) / static_cast<double>(n));
        return f;
    }

    basis_pair dft_basis(const array_config& array, arma::uword units)
    {
        array.validate();
        const arma::cx_mat block =
            arma::kron(dft_matrix(array.ports_vertical), dft_matrix(array.ports_horizontal));
        const arma::uword b = block.n_rows;
        arma::cx_mat spatial(array.total_ports(), array.total_ports(), arma::fill::zeros);
        for (arma::uword p = 0; p < array.polarizations; ++p)
            spatial.submat(p * b, p * b, (p + 1) * b - 1, (p + 1) * b - 1) = block;

        basis_pair out;
        out.spatial = spatial;
        out.frequency = dft_matrix(units);
        out.kind = basis_kind::dft;
        return out;
    }

    namespace
    {
        // Rotate each eigenvector so its largest-magnitude entry is real positive
        void normalize_phases(arma::cx_mat& v)
        {
            for (arma::uword c = 0; c < v.n_cols; ++c)
            {
                const arma::uword k = arma::abs(v.col(c)).index_max();
                const cx z = v(k, c);
                if (std::abs(z) > 0.0)
                    v.col(c) *= std::conj(z) / std::abs(z);
            }
        }

        arma::cx_mat descending_eigvecs(const arma::cx_mat& cov)
        {
            arma::vec eigval;
            arma::cx_mat eigvec;
            if (!arma::eig_sym(eigval, eigvec, arma::cx_mat(0.5 * (cov + cov.t()))))
                throw std::runtime_error("eigen_basis: eigendecomposition failed");
            eigvec = arma::fliplr(eigvec);
            normalize_phases(eigvec);
            return eigvec;
        }
    } // namespace

    basis_pair eigen_basis(const std::vector<channel_snapshot>& samples)
    {
        if (samples.empty())
            throw std::invalid_argument("eigen_basis: no samples");
        const arma::uword P = samples.front().matrix.n_rows;
        const arma::uword F = samples.front().matrix.n_cols;
        arma::cx_mat cov_s(P, P, arma::fill::zeros);
        arma::cx_mat cov_f(F, F, arma::fill::zeros);
        for (const auto& s : samples)
        {
            if (s.matrix.n_rows != P || s.matrix.n_cols != F)
                throw std::invalid_argument("eigen_basis: inconsistent snapshot dimensions");
            cov_s += s.matrix * s.matrix.t();
            cov_f += s.matrix.t() * s.matrix;
        }
        if (arma::abs(cov_s).max() == 0.0)
            throw std::invalid_argument("empty covariance");

        basis_pair out;
        out.spatial = descending_eigvecs(cov_s);
        out.frequency = descending_eigvecs(cov_f);
        out.kind = basis_kind::eigen;
        return out;
    }

    std::vector<path_cluster> cluster_scenario::draw(rng& gen, const array_config& array,
                                                     const frequency_grid& grid) const
    {
        const double tau_max = tau_max_s > 0.0 ? tau_max_s : 1.0 / grid.unit_spacing_hz;
        const arma::uword L =
            paths_min + static_cast<arma::uword>(gen.integer(paths_max - paths_min + 1));
        const arma::uword blocks = array.polarizations;
        const double mean_power =
            static_cast<double>(array.total_ports()) / static_cast<double>(L * blocks);

        std::vector<path_cluster> paths;
        paths.reserve(L * blocks);
        for (arma::uword i = 0; i < L; ++i)
        {
            path_cluster base;
            base.azimuth = gen.uniform(-sector_halfwidth, sector_halfwidth);
            base.zenith = 0.5 * pi + gen.uniform(-zenith_halfwidth, zenith_halfwidth);
            base.delay_s = gen.uniform(0.0, 0.5 * tau_max);
            if (doppler_max_hz > 0.0)
            {
                const double mag = gen.uniform(doppler_min_hz, doppler_max_hz);
                base.doppler_hz = gen.uniform() < 0.5 ? -mag : mag;
            }
            for (arma::uword p = 0; p < blocks; ++p)
            {
                path_cluster c = base;
                c.pol = blocks == 1 ? -1 : static_cast<int>(p);
                c.gain = gen.cx_gaussian(mean_power);
                paths.push_back(c);
            }
        }
        return paths;
    }

    std::vector<path_cluster> cluster_scenario::redraw_gains(const std::vector<path_cluster>& paths,
                                                             rng& gen, const array_config& array) const
    {
        const double mean_power =
            static_cast<double>(array.total_ports()) / static_cast<double>(paths.size());
        std::vector<path_cluster> out = paths;
        for (auto& p : out)
            p.gain = gen.cx_gaussian(mean_power);
        return out;
    }

} // namespace mimosim
