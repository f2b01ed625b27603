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

#include "thz/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "thz/errors.hpp"
#include "thz/metrics.hpp"
#include "thz/quantization.hpp"
#include "thz/stage1.hpp"

namespace thz {

namespace {

// Concatenated multi-user taps H_MU(l).
std::vector<CMatrix> system_taps(const ChannelRealization& ch)
{
    const std::size_t taps = ch.taps[0].size();
    std::vector<CMatrix> out;
    out.reserve(taps);
    for (std::size_t l = 0; l < taps; ++l) {
        const auto rows = ch.taps[0][l].rows();
        const auto cols = ch.taps[0][l].cols();
        CMatrix h(rows, cols * static_cast<Eigen::Index>(ch.taps.size()));
        for (std::size_t u = 0; u < ch.taps.size(); ++u)
            h.middleCols(static_cast<Eigen::Index>(u) * cols, cols) = ch.taps[u][l];
        out.push_back(std::move(h));
    }
    return out;
}

// Quantizes each chain (row across samples) with its own AGC scale.
std::vector<CVector> quantize_chains(const std::vector<CVector>& samples, AdcResolution adc, bool& zero)
{
    if (adc.is_ideal())
        return samples;
    const auto chains = samples[0].size();
    const auto n = static_cast<Eigen::Index>(samples.size());
    std::vector<CVector> out(samples.size(), CVector(chains));
    CVector row(n);
    for (Eigen::Index c = 0; c < chains; ++c) {
        for (Eigen::Index i = 0; i < n; ++i)
            row(i) = samples[static_cast<std::size_t>(i)](c);
        const auto q = quantize(row, adc);
        zero = zero || q.zero_input;
        for (Eigen::Index i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)](c) = q.values(i);
    }
    return out;
}

void check_block(std::span<const CVector> symbols, const SystemConfig& cfg)
{
    if (symbols.size() != static_cast<std::size_t>(cfg.num_bins))
        throw LengthMismatch("oracle: block must have K symbol vectors");
    for (const auto& s : symbols) {
        if (s.size() != cfg.total_streams)
            throw ShapeMismatch("oracle: symbol vectors must have N_s entries");
    }
}

// W_RF[k]^H H_MU[k] F[k] for every bin
std::vector<CMatrix> chain_gains(const ChannelRealization& ch, std::span<const HybridPrecoder> precoders,
                                 const HybridCombiner& combiner)
{
    std::vector<CMatrix> out;
    out.reserve(ch.mu.size());
    for (std::size_t k = 0; k < ch.mu.size(); ++k)
        out.push_back(combiner.rf_at(k).adjoint() * (ch.mu[k] * system_precoder(precoders, k)));
    return out;
}

// Cholesky factor of the bin-averaged combiner Gram matrix
CMatrix noise_shaping(const HybridCombiner& combiner, std::size_t bins)
{
    const auto chains = combiner.rf.cols();
    CMatrix gram = CMatrix::Zero(chains, chains);
    for (std::size_t k = 0; k < bins; ++k)
        gram += combiner.rf_at(k).adjoint() * combiner.rf_at(k);
    gram /= static_cast<double>(bins);
    Eigen::LLT<CMatrix> llt(gram);
    if (llt.info() != Eigen::Success)
        throw SingularGram("oracle: combiner Gram matrix is not positive definite");
    return llt.matrixL();
}

// Chain-domain samples: IDFT of G[k] b[k] plus sigma^2-scaled shaped noise.
std::vector<CVector> chain_samples(std::span<const CMatrix> gains, const CMatrix& shaping,
                                   std::span<const CVector> symbols_freq, double noise_variance,
                                   bool add_noise, Rng& rng)
{
    const std::size_t k_len = gains.size();
    std::vector<CVector> zf;
    zf.reserve(k_len);
    for (std::size_t k = 0; k < k_len; ++k)
        zf.push_back(gains[k] * symbols_freq[k]);
    auto z = idft_sequence(std::span<const CVector>(zf), k_len);
    if (add_noise) {
        for (auto& v : z)
            v += shaping * rng.complex_gaussian(shaping.cols(), noise_variance);
    }
    return z;
}

} // namespace

std::vector<CVector> zero_padded_block(const SystemConfig& cfg, Rng& rng)
{
    std::vector<CVector> out;
    out.reserve(static_cast<std::size_t>(cfg.num_bins));
    for (int n = 0; n < cfg.num_bins; ++n) {
        if (n < cfg.data_block_len)
            out.push_back(rng.complex_gaussian(cfg.total_streams, cfg.symbol_variance));
        else
            out.push_back(CVector::Zero(cfg.total_streams));
    }
    return out;
}

OracleOutput time_domain_oracle(const ChannelRealization& ch, std::span<const HybridPrecoder> precoders,
                                const HybridCombiner& combiner, const SystemConfig& cfg,
                                std::span<const CVector> symbols_time, Rng& rng,
                                const OracleOptions& options)
{
    check_block(symbols_time, cfg);
    const auto k_len = static_cast<std::size_t>(cfg.num_bins);

    OracleOutput out;
    out.symbols_freq = dft_sequence(symbols_time, k_len);

    if (options.mode == OracleMode::direct) {
        // per-bin precoding, back to time: x(n) = IDFT(F[k] b[k])
        std::vector<CVector> xf;
        xf.reserve(k_len);
        for (std::size_t k = 0; k < k_len; ++k)
            xf.push_back(system_precoder(precoders, k) * out.symbols_freq[k]);
        const auto x = idft_sequence(std::span<const CVector>(xf), k_len);

        const auto taps = system_taps(ch);
        auto r = circular_convolve(taps, x, k_len);
        if (options.add_noise) {
            for (auto& v : r)
                v += rng.complex_gaussian(v.size(), cfg.noise_variance);
        }

        if (combiner.per_bin()) {
            const auto rf_freq = dft_sequence(std::span<const CVector>(r), k_len);
            std::vector<CVector> zf;
            zf.reserve(k_len);
            for (std::size_t k = 0; k < k_len; ++k)
                zf.push_back(combiner.rf_at(k).adjoint() * rf_freq[k]);
            out.pre_adc = idft_sequence(std::span<const CVector>(zf), k_len);
        } else {
            out.pre_adc.reserve(k_len);
            for (const auto& v : r)
                out.pre_adc.push_back(combiner.rf.adjoint() * v);
        }
    } else {
        const auto gains = chain_gains(ch, precoders, combiner);
        const CMatrix shaping = options.add_noise ? noise_shaping(combiner, k_len) : CMatrix();
        out.pre_adc = chain_samples(gains, shaping, out.symbols_freq, cfg.noise_variance, options.add_noise, rng);
    }

    out.post_adc = quantize_chains(out.pre_adc, cfg.adc, out.zero_input);
    const auto yf = dft_sequence(std::span<const CVector>(out.post_adc), k_len);
    out.received.reserve(k_len);
    for (std::size_t k = 0; k < k_len; ++k)
        out.received.push_back(combiner.baseband[k].adjoint() * yf[k]);
    return out;
}

std::vector<CVector> frequency_domain_model(const ChannelRealization& ch,
                                            std::span<const HybridPrecoder> precoders,
                                            const HybridCombiner& combiner, double xi,
                                            std::span<const CVector> symbols_freq)
{
    std::vector<CVector> out;
    out.reserve(symbols_freq.size());
    for (std::size_t k = 0; k < symbols_freq.size(); ++k) {
        const CMatrix w = xi * combiner.rf_at(k) * combiner.baseband[k];
        out.push_back(w.adjoint() * (ch.mu[k] * (system_precoder(precoders, k) * symbols_freq[k])));
    }
    return out;
}

BussgangEstimate bussgang_monte_carlo(const ChannelRealization& ch,
                                      std::span<const HybridPrecoder> precoders,
                                      const HybridCombiner& combiner, const SystemConfig& cfg,
                                      int blocks, Rng& rng)
{
    if (blocks < 1)
        throw ValueError("bussgang_monte_carlo: need at least one block");
    const double xi = bussgang_gain(cfg.adc);
    const auto chains = combiner.rf.cols();
    const auto qmodel = receiver_quantization_model(ch, precoders, combiner, cfg);

    RVector err = RVector::Zero(chains), power = RVector::Zero(chains);
    CVector cross = CVector::Zero(chains);
    long samples = 0;
    const auto k_len = static_cast<std::size_t>(cfg.num_bins);
    const auto gains = chain_gains(ch, precoders, combiner);
    const CMatrix shaping = noise_shaping(combiner, k_len);
    auto draw = [&] {
        const auto symbols = zero_padded_block(cfg, rng);
        const auto freq = dft_sequence(std::span<const CVector>(symbols), k_len);
        return chain_samples(gains, shaping, freq, cfg.noise_variance, true, rng);
    };

    // ADC full scale set once from a separate calibration run; a per-block
    // estimate over K samples is too noisy and correlates the error with z.
    RVector scale = RVector::Zero(chains);
    const int calibration = std::clamp(blocks, 256, 4096);
    long calib_samples = 0;
    for (int b = 0; b < calibration; ++b) {
        for (const auto& z : draw())
            scale += z.cwiseAbs2();
        calib_samples += cfg.num_bins;
    }
    scale = (scale / (2.0 * static_cast<double>(calib_samples))).cwiseSqrt();

    for (int b = 0; b < blocks; ++b) {
        const auto pre = draw();
        for (std::size_t n = 0; n < pre.size(); ++n) {
            const CVector& z = pre[n];
            CVector q = z;
            if (!cfg.adc.is_ideal()) {
                for (Eigen::Index c = 0; c < chains; ++c)
                    q(c) = scale(c) > 0.0 ? quantize_with_scale(z.segment(c, 1), scale(c), cfg.adc)(0) : Complex(0.0);
            }
            const CVector e = q - xi * z;
            for (Eigen::Index c = 0; c < chains; ++c) {
                err(c) += std::norm(e(c));
                power(c) += std::norm(z(c));
                cross(c) += std::conj(z(c)) * e(c);
            }
        }
        samples += static_cast<long>(pre.size());
    }

    BussgangEstimate est;
    est.samples_per_chain = samples;
    est.error_variance = err / static_cast<double>(samples);
    est.input_power = power / static_cast<double>(samples);
    est.predicted_variance = qmodel.quantization_noise.diagonal().real();
    for (Eigen::Index c = 0; c < chains; ++c) {
        const double denom = std::sqrt(power(c) * err(c));
        const double corr = denom > 0.0 ? std::abs(cross(c)) / denom : 0.0;
        est.max_abs_correlation = std::max(est.max_abs_correlation, corr);
    }
    return est;
}

} // namespace thz
