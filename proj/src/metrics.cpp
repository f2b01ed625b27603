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

#include "thz/metrics.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "thz/errors.hpp"
#include "thz/stage1.hpp"
#include "thz/stage2.hpp"

namespace thz {

namespace {

// Leading eigenvectors of H^H H; same subspace as the dominant right-singular vectors.
CMatrix dominant_right_vectors(const CMatrix& h, int count)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h.adjoint() * h);
    if (eig.info() != Eigen::Success)
        throw ConvergenceFailure("eigendecomposition failed");
    return eig.eigenvectors().rightCols(count).rowwise().reverse();
}

} // namespace

CMatrix effective_noise_cov_per_bin(const CMatrix& w_bb, const CMatrix& c)
{
    if (c.rows() != c.cols() || w_bb.rows() != c.rows())
        throw ShapeMismatch("effective_noise_cov_per_bin: W_BB and C disagree");
    return w_bb.adjoint() * c * w_bb;
}

double bin_spectral_efficiency(const CMatrix& signal, const CMatrix& noise, int streams)
{
    const auto n = noise.rows();
    if (noise.cols() != n || signal.rows() != n || signal.cols() != n)
        throw ShapeMismatch("bin_spectral_efficiency: S and C~ must be square and equal");
    const CMatrix herm = 0.5 * (noise + noise.adjoint());
    Eigen::LLT<CMatrix> llt(herm);
    if (llt.info() != Eigen::Success)
        throw SingularNoise("effective noise covariance is not positive definite");
    const auto& l = llt.matrixL();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(std::real(llt.matrixLLT()(i, i)) > 0.0))
            throw SingularNoise("effective noise covariance is singular");
    }
    // M = L^-1 S L^-H / streams
    CMatrix m = l.solve(signal);
    m = l.solve(m.adjoint()).adjoint();
    m /= static_cast<double>(streams);
    const CMatrix arg = CMatrix::Identity(n, n) + 0.5 * (m + m.adjoint());
    return log_det_hpd(arg) / std::log(2.0);
}

ReceiverTerms receiver_terms(const ChannelRealization& ch, std::span<const HybridPrecoder> precoders,
                             const HybridCombiner& combiner, const SystemConfig& cfg)
{
    const std::size_t bins = ch.mu.size();
    std::vector<std::vector<CMatrix>> per_user(precoders.size());
    for (std::size_t u = 0; u < precoders.size(); ++u) {
        per_user[u].reserve(bins);
        for (std::size_t k = 0; k < bins; ++k)
            per_user[u].push_back(precoders[u].effective(k));
    }
    std::vector<CMatrix> rf;
    rf.reserve(bins);
    ReceiverTerms t;
    t.gram = CMatrix::Zero(combiner.rf.cols(), combiner.rf.cols());
    for (std::size_t k = 0; k < bins; ++k) {
        rf.push_back(combiner.rf_at(k));
        t.gram += rf.back().adjoint() * rf.back();
    }
    t.gram /= static_cast<double>(bins);
    t.signal = combined_signal_covariance(ch.freq, rf, per_user, cfg.symbol_variance);
    return t;
}

QuantizationModel receiver_quantization_model(const ChannelRealization& ch,
                                              std::span<const HybridPrecoder> precoders,
                                              const HybridCombiner& combiner,
                                              const SystemConfig& cfg)
{
    const auto t = receiver_terms(ch, precoders, combiner, cfg);
    return make_quantization_model(cfg.adc, t.signal, t.gram, cfg.noise_variance);
}

std::vector<double> spectral_efficiency_per_bin(const ChannelRealization& ch,
                                                std::span<const HybridPrecoder> precoders,
                                                const HybridCombiner& combiner,
                                                const QuantizationModel& qmodel,
                                                const SystemConfig& cfg)
{
    const std::size_t bins = ch.mu.size();
    if (combiner.baseband.size() != bins)
        throw ShapeMismatch("spectral efficiency: combiner has the wrong number of bins");
    std::vector<double> out;
    out.reserve(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const CMatrix& w_bb = combiner.baseband[k];
        const CMatrix w = qmodel.gain * combiner.rf_at(k) * w_bb;  // W_RF A^H W_BB
        const CMatrix g = w.adjoint() * (ch.mu[k] * system_precoder(precoders, k));
        const CMatrix s = cfg.symbol_variance * g * g.adjoint();
        const CMatrix c = effective_noise_cov_per_bin(w_bb, qmodel.effective_noise);
        out.push_back(bin_spectral_efficiency(s, c, cfg.total_streams));
    }
    return out;
}

double sum_spectral_efficiency(const ChannelRealization& ch, std::span<const HybridPrecoder> precoders,
                               const HybridCombiner& combiner, const QuantizationModel& qmodel,
                               const SystemConfig& cfg)
{
    const auto per_bin = spectral_efficiency_per_bin(ch, precoders, combiner, qmodel, cfg);
    double sum = 0.0;
    for (double v : per_bin)
        sum += v;
    return sum / static_cast<double>(per_bin.size());
}

double fully_digital_spectral_efficiency(const ChannelRealization& ch, const SystemConfig& cfg)
{
    if (!(cfg.noise_variance > 0.0))
        throw SingularNoise("fully digital reference needs a positive noise variance");
    const std::size_t bins = ch.mu.size();
    const int ns = cfg.total_streams;
    const double scale = cfg.symbol_variance / (ns * cfg.noise_variance);
    double sum = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        std::vector<CMatrix> blocks;
        for (int u = 0; u < cfg.num_users; ++u)
            blocks.push_back(dominant_right_vectors(ch.freq[u][k], cfg.streams_per_user));
        const CMatrix g = ch.mu[k] * block_diagonal(blocks);
        const CMatrix arg = CMatrix::Identity(ns, ns) + scale * (g.adjoint() * g);
        sum += log_det_hpd(0.5 * (arg + arg.adjoint())) / std::log(2.0);
    }
    return sum / static_cast<double>(bins);
}

std::vector<NagSample> nag_sweep(const CVector& beam, double steer_sin, bool compensate,
                                 std::span<const double> directions_sin, std::span<const int> bins,
                                 const SystemConfig& cfg)
{
    std::vector<NagSample> out;
    out.reserve(directions_sin.size() * bins.size());
    for (int k : bins) {
        const double f = bin_frequency(k, cfg);
        const CVector b = compensate
                              ? apply_ttd(beam, steer_sin, f, cfg.carrier_frequency_hz, cfg.ttd_per_chain)
                              : beam;
        for (double s : directions_sin) {
            const double nag = normalized_array_gain(b, std::asin(s), f, cfg.carrier_frequency_hz);
            out.push_back({k, f, s, nag});
        }
    }
    return out;
}

double peak_direction(const CVector& beam, double freq_hz, double carrier_hz, int grid_points)
{
    if (grid_points < 2)
        throw ValueError("peak_direction: grid needs at least two points");
    auto gain = [&](double s) { return normalized_array_gain(beam, std::asin(s), freq_hz, carrier_hz); };

    const double step = 2.0 / (grid_points - 1);
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i < grid_points; ++i) {
        const double v = gain(-1.0 + i * step);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }

    double lo = std::max(-1.0, -1.0 + (best - 1) * step);
    double hi = std::min(1.0, -1.0 + (best + 1) * step);
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = gain(x1), f2 = gain(x2);
    while (hi - lo > 1e-12) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = gain(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = gain(x1);
        }
    }
    const double refined = 0.5 * (lo + hi);
    return gain(refined) >= best_val ? refined : -1.0 + best * step;
}

} // namespace thz
