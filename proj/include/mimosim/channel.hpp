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

#ifndef mimosim_channel_H
#define mimosim_channel_H

#include <armadillo>
#include <vector>

#include "mimosim/rng.hpp"

namespace mimosim
{
    using cx = std::complex<double>;

    // Uniform planar array with dual-polarized port blocks. Port index order is
    // pol * (ports_vertical * ports_horizontal) + row * ports_horizontal + col.
    struct array_config
    {
        arma::uword ports_vertical = 1;
        arma::uword ports_horizontal = 1;
        arma::uword polarizations = 1; // 1 or 2
        double spacing_v = 0.5;        // element spacing in wavelengths
        double spacing_h = 0.5;

        arma::uword total_ports() const { return ports_vertical * ports_horizontal * polarizations; }
        void validate() const;
    };

    // One propagation path: complex gain, Doppler shift, direction and delay.
    // pol < 0 excites both polarization blocks with the same gain; pol 0/1
    // restricts the path to one block so blocks can fade independently.
    struct path_cluster
    {
        cx gain = 1.0;
        double doppler_hz = 0.0;
        double azimuth = 0.0; // radians
        double zenith = 1.5707963267948966;
        double delay_s = 0.0;
        int pol = -1;
    };

    struct frequency_grid
    {
        arma::uword units = 1;         // number of frequency-domain units
        double unit_spacing_hz = 1e6;  // spacing between unit centers
        arma::uword subcarriers_per_unit = 12;

        void validate() const;
    };

    // Channel matrix on the port x frequency-unit grid at one time instant
    struct channel_snapshot
    {
        arma::cx_mat matrix; // total_ports x units
        double time_s = 0.0;
    };

    enum class basis_kind { dft, eigen };

    // Unitary spatial (P x P) and frequency (N_f x N_f) bases
    struct basis_pair
    {
        arma::cx_mat spatial;
        arma::cx_mat frequency;
        basis_kind kind = basis_kind::dft;

        // max |B^H B - I| over both bases
        double unitarity_error() const;
    };

    // Unit-norm array response for a plane wave from (azimuth, zenith).
    // Phase of element k is 2*pi times the projection of its position onto the
    // wave direction, in wavelengths; polarization blocks are steered equally.
    arma::cx_vec steering_vector(double azimuth, double zenith, const array_config& array);

    // Same steering but restricted to one polarization block (zero elsewhere),
    // renormalized to unit norm. pol < 0 returns the full-array vector.
    arma::cx_vec steering_vector_pol(double azimuth, double zenith, const array_config& array, int pol);

    // Frequency response of a pure delay: element f = exp(-j*2*pi*f*spacing*delay)
    arma::cx_vec delay_vector(double delay_s, const frequency_grid& grid);

    // H(t) = sum_i gain_i * exp(j*2*pi*doppler_i*t) * steer_i * delay_i^T
    // Parallel over matrix entries; bit-identical to synthesize_channel_serial.
    channel_snapshot synthesize_channel(const std::vector<path_cluster>& paths, double t,
                                        const array_config& array, const frequency_grid& grid);

    // Serial reference implementation kept for testing and benchmarking
    channel_snapshot synthesize_channel_serial(const std::vector<path_cluster>& paths, double t,
                                               const array_config& array, const frequency_grid& grid);

    // Unitary DFT matrix, F(j,k) = exp(-j*2*pi*j*k/n)/sqrt(n)
    arma::cx_mat dft_matrix(arma::uword n);

    // DFT basis pair: spatial = per-polarization block-diagonal 2D DFT
    // (vertical kron horizontal), frequency = unitary DFT over units
    basis_pair dft_basis(const array_config& array, arma::uword units);

    // Eigenvector bases of the accumulated spatial covariance sum H H^H and
    // frequency covariance sum H^H H, eigenvalues in descending order.
    basis_pair eigen_basis(const std::vector<channel_snapshot>& samples);

    // Random multipath scenario: a stand-in for a full geometric channel model.
    // Draws L paths per polarization block with azimuth uniform in a sector,
    // delays uniform in [0, tau_max/2), Rayleigh gains scaled so that the
    // ensemble average of ||H||_F^2 equals total_ports * units.
    struct cluster_scenario
    {
        arma::uword paths_min = 2;
        arma::uword paths_max = 8;
        double sector_halfwidth = 1.0471975511965976; // 60 deg
        double zenith_halfwidth = 0.2617993877991494; // 15 deg around broadside
        double tau_max_s = 0.0;                       // default 1 / unit_spacing
        double doppler_max_hz = 0.0;
        double doppler_min_hz = 0.0; // lower bound on |Doppler| when moving

        std::vector<path_cluster> draw(rng& gen, const array_config& array,
                                       const frequency_grid& grid) const;

        // Same geometry with gains redrawn: fixed-covariance ensembles
        std::vector<path_cluster> redraw_gains(const std::vector<path_cluster>& paths, rng& gen,
                                               const array_config& array) const;
    };

    // Deterministic multipath process: paths plus the grids they live on
    struct channel_process
    {
        std::vector<path_cluster> paths;
        array_config array;
        frequency_grid grid;

        channel_snapshot at(double t) const { return synthesize_channel(paths, t, array, grid); }
    };

} // namespace mimosim

#endif
