// Copyright 2026 The thzsim Authors
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

#include "thz/stage1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "thz/errors.hpp"

namespace thz {

namespace {

// Rotate v so its largest-magnitude entry is real-positive.
void align_phase(Eigen::Ref<CVector> v)
{
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > best_mag + 1e-12) {
            best_mag = mag;
            best = i;
        }
    }
    if (best_mag > 0.0)
        v *= std::conj(v(best)) / best_mag;
}

// index of the largest entry; values within a relative 1e-12 of the maximum
// count as ties and resolve to the lowest index (aliased grid endpoints give
// mathematically equal scores)
Eigen::Index argmax_lowest(const RVector& x, const std::vector<bool>& excluded)
{
    auto skip = [&](Eigen::Index i) { return !excluded.empty() && excluded[static_cast<std::size_t>(i)]; };
    double best_val = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!skip(i))
            best_val = std::max(best_val, x(i));
    }
    const double floor = best_val - 1e-12 * std::abs(best_val);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!skip(i) && x(i) >= floor)
            return i;
    }
    return -1;
}

} // namespace

OptimalPrecoder per_bin_optimal_precoder(const CMatrix& h, int streams)
{
    if (streams < 1 || streams > h.cols())
        throw DimensionError("per_bin_optimal_precoder: " + std::to_string(streams) +
                             " streams for a channel with " + std::to_string(h.cols()) + " inputs");
    if (!all_finite(h))
        throw ValueError("per_bin_optimal_precoder: non-finite channel");

    Eigen::JacobiSVD<CMatrix> solver(h, Eigen::ComputeFullV);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("per_bin_optimal_precoder: SVD failed");
    const RVector& sv = solver.singularValues();
    const double tol = sv.size() ? sv(0) * 1e-12 * static_cast<double>(std::max(h.rows(), h.cols())) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol && sv(i) > 0.0)
            ++rank;
    }

    OptimalPrecoder out;
    out.columns = solver.matrixV().leftCols(streams);
    out.rank_deficient = rank < streams;
    for (int c = 0; c < streams; ++c)
        align_phase(out.columns.col(c));
    return out;
}

CMatrix average_precoder(std::span<const CMatrix> per_bin)
{
    if (per_bin.empty())
        throw LengthMismatch("average_precoder: no bins");
    CMatrix sum = CMatrix::Zero(per_bin[0].rows(), per_bin[0].cols());
    for (const auto& f : per_bin) {
        if (f.rows() != sum.rows() || f.cols() != sum.cols())
            throw ShapeMismatch("average_precoder: bins differ in shape");
        sum += f;
    }
    return sum / static_cast<double>(per_bin.size());
}

Dictionary build_dictionary(int antennas, int grid_size, double carrier_hz)
{
    if (antennas < 1 || grid_size < 1)
        throw ValueError("build_dictionary: antennas and grid size must be positive");
    Dictionary d;
    d.atoms.resize(antennas, grid_size);
    for (int g = 0; g < grid_size; ++g) {
        const double s = grid_size == 1 ? 0.0 : 2.0 * g / (grid_size - 1) - 1.0;
        const double theta = std::asin(s);
        d.sines.push_back(s);
        d.angles.push_back(theta);
        d.atoms.col(g) = array_response(antennas, theta, carrier_hz, carrier_hz);
    }
    return d;
}

HybridPrecoder somp_precoder(const CMatrix& f_opt, const Dictionary& dict, int rf_chains)
{
    if (dict.atoms.rows() != f_opt.rows())
        throw ShapeMismatch("somp_precoder: dictionary and target disagree in antenna count");
    if (dict.size() < rf_chains)
        throw GridTooSmall("somp_precoder: grid of " + std::to_string(dict.size()) +
                           " atoms cannot supply " + std::to_string(rf_chains) + " RF chains");
    const auto streams = f_opt.cols();

    HybridPrecoder p;
    p.rf.resize(f_opt.rows(), 0);
    std::vector<bool> used(static_cast<std::size_t>(dict.size()), false);
    CMatrix residual = f_opt;
    CMatrix baseband;
    for (int i = 0; i < rf_chains; ++i) {
        const CMatrix phi = dict.atoms.adjoint() * residual;
        const RVector energy = phi.rowwise().squaredNorm();
        const auto g = argmax_lowest(energy, used);
        used[static_cast<std::size_t>(g)] = true;
        p.selected_indices.push_back(static_cast<int>(g));
        p.selected_sines.push_back(dict.sines[static_cast<std::size_t>(g)]);

        p.rf.conservativeResize(Eigen::NoChange, i + 1);
        p.rf.col(i) = dict.atoms.col(g);
        baseband = hermitian_solve(p.rf.adjoint() * p.rf, p.rf.adjoint() * f_opt);
        residual = f_opt - p.rf * baseband;
        const double norm = residual.norm();
        if (norm > 0.0)
            residual /= norm;
    }
    p.residual = (f_opt - p.rf * baseband).norm();

    const double power = (p.rf * baseband).norm();
    if (power > 0.0)
        baseband *= std::sqrt(static_cast<double>(streams)) / power;
    p.baseband = std::move(baseband);
    return p;
}

CMatrix mmse_combiner_per_bin(const CMatrix& h_eq, double noise_variance, int streams)
{
    const auto n = h_eq.cols();
    const CMatrix gram = h_eq.adjoint() * h_eq +
                         noise_variance * static_cast<double>(streams) * CMatrix::Identity(n, n);
    // W = H G^-1 = (G^-1 H^H)^H since G is Hermitian
    return hermitian_solve(gram, h_eq.adjoint()).adjoint();
}

HybridCombiner spatially_sparse_combiner(std::span<const CMatrix> w_opt,
                                         const Dictionary& subarray_dict, int subarrays, double xi)
{
    if (w_opt.empty())
        throw LengthMismatch("spatially_sparse_combiner: no bins");
    if (!(xi > 0.0))
        throw ValueError("spatially_sparse_combiner: Bussgang gain must be positive");
    const auto n_sub = subarray_dict.atoms.rows();
    const auto n_bs = w_opt[0].rows();
    const auto streams = w_opt[0].cols();
    if (n_sub * subarrays != n_bs)
        throw ShapeMismatch("spatially_sparse_combiner: subarray dictionary does not tile the array");
    const auto bins = static_cast<Eigen::Index>(w_opt.size());

    CMatrix target(n_bs, bins * streams);
    for (Eigen::Index k = 0; k < bins; ++k) {
        if (w_opt[k].rows() != n_bs || w_opt[k].cols() != streams)
            throw ShapeMismatch("spatially_sparse_combiner: per-bin targets differ in shape");
        target.middleCols(k * streams, streams) = w_opt[k];
    }

    HybridCombiner c;
    c.rf = CMatrix::Zero(n_bs, subarrays);
    c.target.assign(w_opt.begin(), w_opt.end());

    // Subarray blocks are disjoint, so each selection only rewrites its own
    // rows of the residual. The global normalization is a common scale and is
    // carried separately.
    CMatrix residual = target;
    double scale = 1.0;
    for (int s = 0; s < subarrays; ++s) {
        const auto rows = residual.middleRows(s * n_sub, n_sub);
        const CMatrix phi = subarray_dict.atoms.adjoint() * rows * scale;
        const RVector energy = phi.rowwise().squaredNorm();
        const auto g = argmax_lowest(energy, {});
        c.selected_indices.push_back(static_cast<int>(g));
        c.selected_sines.push_back(subarray_dict.sines[static_cast<std::size_t>(g)]);
        const CVector w = subarray_dict.atoms.col(g);
        c.rf.block(s * n_sub, s, n_sub, 1) = w;

        // rows of W_opt - W_RF W_RF^H W_opt for this subarray
        const auto block = target.middleRows(s * n_sub, n_sub);
        residual.middleRows(s * n_sub, n_sub) = block - w * (w.adjoint() * block);
        const double norm = residual.norm();
        c.residual_history.push_back(norm);
        scale = norm > 0.0 ? 1.0 / norm : 1.0;
    }

    const CMatrix gram = c.rf.adjoint() * c.rf;
    if ((gram - CMatrix::Identity(subarrays, subarrays)).norm() > 1e-10)
        throw SingularGram("spatially_sparse_combiner: RF combiner Gram matrix is not the identity");

    c.baseband.reserve(w_opt.size());
    for (const auto& w : w_opt)
        c.baseband.push_back(c.rf.adjoint() * w / xi);
    return c;
}

std::vector<HybridPrecoder> design_precoders(const ChannelRealization& ch, const SystemConfig& cfg)
{
    const Dictionary dict =
        build_dictionary(cfg.tx_antennas_per_user, cfg.tx_grid_size, cfg.carrier_frequency_hz);
    std::vector<HybridPrecoder> out;
    out.reserve(static_cast<std::size_t>(cfg.num_users));
    for (int u = 0; u < cfg.num_users; ++u) {
        std::vector<CMatrix> per_bin;
        per_bin.reserve(ch.freq[u].size());
        for (const auto& h : ch.freq[u])
            per_bin.push_back(per_bin_optimal_precoder(h, cfg.streams_per_user).columns);
        out.push_back(somp_precoder(average_precoder(per_bin), dict, cfg.tx_rf_chains_per_user));
    }
    return out;
}

CMatrix system_precoder(std::span<const HybridPrecoder> precoders, std::size_t k)
{
    std::vector<CMatrix> blocks;
    blocks.reserve(precoders.size());
    for (const auto& p : precoders)
        blocks.push_back(p.effective(k));
    return block_diagonal(blocks);
}

std::vector<CMatrix> mmse_targets(const ChannelRealization& ch,
                                  std::span<const HybridPrecoder> precoders,
                                  const SystemConfig& cfg)
{
    std::vector<CMatrix> out;
    out.reserve(ch.mu.size());
    for (std::size_t k = 0; k < ch.mu.size(); ++k) {
        const CMatrix h_eq = ch.mu[k] * system_precoder(precoders, k);
        out.push_back(mmse_combiner_per_bin(h_eq, cfg.noise_variance, cfg.total_streams));
    }
    return out;
}

HybridCombiner design_combiner(const ChannelRealization& ch,
                               std::span<const HybridPrecoder> precoders, const SystemConfig& cfg,
                               double xi)
{
    const Dictionary dict = build_dictionary(cfg.bs_antennas_per_subarray,
                                             cfg.rx_grid_size_per_subarray, cfg.carrier_frequency_hz);
    const auto targets = mmse_targets(ch, precoders, cfg);
    return spatially_sparse_combiner(targets, dict, cfg.bs_rf_chains, xi);
}

} // namespace thz
