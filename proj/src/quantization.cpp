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

#include "thz/quantization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>

#include "thz/errors.hpp"

namespace thz {

namespace {

double std_pdf(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi);
}

// Upper tail Q(x) = P(X > x).
double upper_tail(double x)
{
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

// Statistics of N(0,1) restricted to [a, b] with 0 <= a < b <= inf.
struct CellMoments {
    double mass;    // P(a < X < b)
    double first;   // E[X 1{a<X<b}]
    double second;  // E[X^2 1{a<X<b}]
};

CellMoments cell_moments(double a, double b)
{
    const double pa = std_pdf(a);
    const double pb = std::isinf(b) ? 0.0 : std_pdf(b);
    const double mass = upper_tail(a) - (std::isinf(b) ? 0.0 : upper_tail(b));
    const double bpb = std::isinf(b) ? 0.0 : b * pb;
    return {mass, pa - pb, mass + a * pa - bpb};
}

LloydMaxCodebook design_codebook(int bits)
{
    const int levels = 1 << bits;
    const int half = levels / 2;

    // Only the positive half is iterated; the codebook is odd-symmetric with a
    // boundary at zero. Initial levels follow the Gaussian compander density.
    std::vector<double> pos(half);
    for (int i = 0; i < half; ++i) {
        const double p = 0.5 + 0.5 * (i + 0.5) / half;
        // inverse normal CDF of p for a N(0, 3) density, by bisection
        double lo = 0.0, hi = 40.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (1.0 - upper_tail(mid / std::sqrt(3.0)) < p)
                lo = mid;
            else
                hi = mid;
        }
        pos[i] = 0.5 * (lo + hi);
    }

    std::vector<double> bounds(half + 1);
    auto set_bounds = [&] {
        bounds[0] = 0.0;
        for (int i = 1; i < half; ++i)
            bounds[i] = 0.5 * (pos[i - 1] + pos[i]);
        bounds[half] = INFINITY;
    };

    // Fixed point y = centroid(y). Plain alternation slows down like 1/N^2,
    // so the same fixed point is solved with Newton steps on the tridiagonal
    // system y - c(y) = 0, falling back to the plain update when a step fails
    // to keep the levels ordered.
    std::vector<double> centroid(half), lower(half), diag(half), upper(half), rhs(half);
    const int max_iterations = 10000;
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        set_bounds();
        for (int i = 0; i < half; ++i) {
            const double a = bounds[i], b = bounds[i + 1];
            const auto m = cell_moments(a, b);
            centroid[i] = m.mass > 0.0 ? m.first / m.mass : pos[i];
            const double da = i == 0 || m.mass <= 0.0 ? 0.0 : std_pdf(a) * (centroid[i] - a) / m.mass;
            const double db = std::isinf(b) || m.mass <= 0.0 ? 0.0 : std_pdf(b) * (b - centroid[i]) / m.mass;
            lower[i] = -0.5 * da;
            upper[i] = -0.5 * db;
            diag[i] = 1.0 - 0.5 * (da + db);
            rhs[i] = -(pos[i] - centroid[i]);
        }
        double change = 0.0;
        for (int i = 0; i < half; ++i)
            change = std::max(change, std::abs(centroid[i] - pos[i]));
        if (change < 1e-12)
            break;

        // Thomas algorithm
        for (int i = 1; i < half; ++i) {
            const double w = lower[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        std::vector<double> step(half);
        step[half - 1] = rhs[half - 1] / diag[half - 1];
        for (int i = half - 2; i >= 0; --i)
            step[i] = (rhs[i] - upper[i] * step[i + 1]) / diag[i];

        std::vector<double> trial(half);
        bool ordered = true;
        for (int i = 0; i < half; ++i) {
            trial[i] = pos[i] + step[i];
            if (!std::isfinite(trial[i]) || trial[i] <= 0.0 || (i > 0 && trial[i] <= trial[i - 1]))
                ordered = false;
        }
        pos = ordered ? trial : centroid;
    }
    if (iter == max_iterations)
        throw ConvergenceFailure("Lloyd-Max iteration did not converge for " +
                                 std::to_string(bits) + " bits");

    set_bounds();
    double distortion_half = 0.0;
    for (int i = 0; i < half; ++i) {
        const auto m = cell_moments(bounds[i], bounds[i + 1]);
        distortion_half += m.second - 2.0 * pos[i] * m.first + pos[i] * pos[i] * m.mass;
    }

    LloydMaxCodebook cb;
    cb.bits = bits;
    cb.iterations = iter;
    cb.distortion = 2.0 * distortion_half;
    cb.levels.resize(levels);
    for (int i = 0; i < half; ++i) {
        cb.levels[half + i] = pos[i];
        cb.levels[half - 1 - i] = -pos[i];
    }
    cb.thresholds.resize(levels - 1);
    for (int i = 0; i + 1 < levels; ++i)
        cb.thresholds[i] = 0.5 * (cb.levels[i] + cb.levels[i + 1]);
    return cb;
}

void check_square(const CMatrix& m, Eigen::Index n, const char* what)
{
    if (m.rows() != n || m.cols() != n)
        throw ShapeMismatch(std::string(what) + " has the wrong shape");
}

} // namespace

double LloydMaxCodebook::quantize(double x) const
{
    const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), x);
    return levels[static_cast<std::size_t>(it - thresholds.begin())];
}

const LloydMaxCodebook& lloyd_max_codebook(int bits)
{
    if (bits < 1)
        throw ValueError("quantizer needs at least one bit");
    if (bits > AdcResolution::max_bits)
        throw UnsupportedResolution(std::to_string(bits) + "-bit codebook is not supported");

    static std::array<std::unique_ptr<LloydMaxCodebook>, AdcResolution::max_bits + 1> table;
    static std::array<std::once_flag, AdcResolution::max_bits + 1> flags;
    std::call_once(flags[bits], [&] { table[bits] = std::make_unique<LloydMaxCodebook>(design_codebook(bits)); });
    return *table[bits];
}

double distortion_factor(AdcResolution adc)
{
    return adc.is_ideal() ? 0.0 : lloyd_max_codebook(adc.bit_count()).distortion;
}

double bussgang_gain(AdcResolution adc)
{
    return 1.0 - distortion_factor(adc);
}

CVector quantize_with_scale(const CVector& x, double component_std, AdcResolution adc)
{
    if (adc.is_ideal())
        return x;
    if (!(component_std > 0.0))
        return CVector::Zero(x.size());
    const auto& cb = lloyd_max_codebook(adc.bit_count());
    CVector y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double re = component_std * cb.quantize(x(i).real() / component_std);
        const double im = component_std * cb.quantize(x(i).imag() / component_std);
        y(i) = Complex(re, im);
    }
    return y;
}

QuantizedVector quantize(const CVector& x, AdcResolution adc)
{
    if (adc.is_ideal())
        return {x, false};
    if (x.size() == 0)
        return {x, true};
    const double component_std = std::sqrt(x.squaredNorm() / (2.0 * static_cast<double>(x.size())));
    if (component_std == 0.0)
        return {CVector::Zero(x.size()), true};
    return {quantize_with_scale(x, component_std, adc), false};
}

CMatrix signal_covariance_qtilde(std::span<const std::vector<CMatrix>> taps,
                                 std::span<const CMatrix> precoders, double symbol_variance)
{
    if (taps.size() != precoders.size() || taps.empty() || taps[0].empty())
        throw ShapeMismatch("signal_covariance_qtilde: one precoder per user required");
    const Eigen::Index n_bs = taps[0][0].rows();
    CMatrix q = CMatrix::Zero(n_bs, n_bs);
    for (std::size_t u = 0; u < taps.size(); ++u) {
        const CMatrix& f = precoders[u];
        for (const auto& h : taps[u]) {
            if (h.rows() != n_bs || h.cols() != f.rows())
                throw ShapeMismatch("signal_covariance_qtilde: tap and precoder shapes disagree");
            const CMatrix hf = h * f;
            q.noalias() += symbol_variance * hf * hf.adjoint();
        }
    }
    return q;
}

CMatrix signal_covariance_qtilde_from_bins(std::span<const std::vector<CMatrix>> freq,
                                           std::span<const std::vector<CMatrix>> precoders,
                                           double symbol_variance)
{
    if (freq.size() != precoders.size() || freq.empty() || freq[0].empty())
        throw ShapeMismatch("signal_covariance_qtilde_from_bins: one precoder set per user required");
    const Eigen::Index n_bs = freq[0][0].rows();
    const std::size_t bins = freq[0].size();
    CMatrix q = CMatrix::Zero(n_bs, n_bs);
    for (std::size_t u = 0; u < freq.size(); ++u) {
        if (freq[u].size() != bins || precoders[u].size() != bins)
            throw ShapeMismatch("signal_covariance_qtilde_from_bins: bin counts disagree");
        for (std::size_t k = 0; k < bins; ++k) {
            const CMatrix hf = freq[u][k] * precoders[u][k];
            q.noalias() += hf * hf.adjoint();
        }
    }
    return q * (symbol_variance / static_cast<double>(bins));
}

CMatrix combined_signal_covariance(std::span<const std::vector<CMatrix>> freq,
                                   std::span<const CMatrix> combiner_rf,
                                   std::span<const std::vector<CMatrix>> precoders,
                                   double symbol_variance)
{
    if (freq.size() != precoders.size() || freq.empty())
        throw ShapeMismatch("combined_signal_covariance: one precoder set per user required");
    const std::size_t bins = combiner_rf.size();
    const Eigen::Index chains = combiner_rf[0].cols();
    CMatrix out = CMatrix::Zero(chains, chains);
    for (std::size_t u = 0; u < freq.size(); ++u) {
        if (freq[u].size() != bins || precoders[u].size() != bins)
            throw ShapeMismatch("combined_signal_covariance: bin counts disagree");
        for (std::size_t k = 0; k < bins; ++k) {
            const CMatrix g = combiner_rf[k].adjoint() * (freq[u][k] * precoders[u][k]);
            out.noalias() += g * g.adjoint();
        }
    }
    return out * (symbol_variance / static_cast<double>(bins));
}

NoiseCovariances noise_covariances_from_terms(const CMatrix& combined_signal,
                                              const CMatrix& combiner_gram, double xi,
                                              double noise_variance)
{
    const Eigen::Index n = combiner_gram.rows();
    check_square(combiner_gram, n, "combiner Gram matrix");
    check_square(combined_signal, n, "combined signal covariance");

    NoiseCovariances out;
    out.quantization = CMatrix::Zero(n, n);
    const CMatrix total = combined_signal + noise_variance * combiner_gram;
    for (Eigen::Index i = 0; i < n; ++i)
        out.quantization(i, i) = xi * (1.0 - xi) * std::real(total(i, i));
    out.effective = xi * xi * noise_variance * combiner_gram + out.quantization;
    return out;
}

NoiseCovariances noise_covariances(const CMatrix& w_rf, const CMatrix& qtilde, double xi,
                                   double noise_variance)
{
    if (qtilde.rows() != w_rf.rows() || qtilde.cols() != w_rf.rows())
        throw ShapeMismatch("noise_covariances: Q and W_RF disagree");
    return noise_covariances_from_terms(w_rf.adjoint() * qtilde * w_rf, w_rf.adjoint() * w_rf, xi,
                                        noise_variance);
}

QuantizationModel make_quantization_model(AdcResolution adc, const CMatrix& combined_signal,
                                          const CMatrix& combiner_gram, double noise_variance)
{
    QuantizationModel m;
    m.adc = adc;
    m.distortion = distortion_factor(adc);
    m.gain = 1.0 - m.distortion;
    m.gain_matrix = m.gain * CMatrix::Identity(combiner_gram.rows(), combiner_gram.cols());
    m.signal_covariance = combined_signal;
    auto cov = noise_covariances_from_terms(combined_signal, combiner_gram, m.gain, noise_variance);
    m.quantization_noise = std::move(cov.quantization);
    m.effective_noise = std::move(cov.effective);
    return m;
}

} // namespace thz
