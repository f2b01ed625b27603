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

#pragma once

#include <span>
#include <vector>

#include "thz/config.hpp"
#include "thz/numerics.hpp"

namespace thz {

/// MMSE scalar quantizer for a unit-variance Gaussian input.
struct LloydMaxCodebook {
    int bits = 0;
    std::vector<double> levels;      // ascending, 2^bits entries
    std::vector<double> thresholds;  // ascending, 2^bits - 1 interior cell boundaries
    double distortion = 0.0;         // E|x - Q(x)|^2 for x ~ N(0, 1)
    int iterations = 0;

    double quantize(double x) const;
};

/// Computed once per resolution by centroid/boundary iteration and cached.
const LloydMaxCodebook& lloyd_max_codebook(int bits);

/// Noise-to-signal ratio rho of the b-bit quantizer; 0 for the ideal ADC.
double distortion_factor(AdcResolution adc);

/// Bussgang gain xi = 1 - rho.
double bussgang_gain(AdcResolution adc);

struct QuantizedVector {
    CVector values;
    bool zero_input = false;  // an all-zero input cannot be scaled; values are zero
};

/// Quantizes real and imaginary parts independently after scaling the vector
/// to unit per-component RMS; the scale is undone on output.
QuantizedVector quantize(const CVector& x, AdcResolution adc);

/// Same, with a caller-provided per-component standard deviation.
CVector quantize_with_scale(const CVector& x, double component_std, AdcResolution adc);

// ---------- Bussgang covariance algebra ----------

/// Q = sum_u sum_n H_u(n) R_uu H_u(n)^H, R_uu = sigma_b^2 F_u F_u^H.
/// taps is [user][tap]; precoders holds F_u = F_RF,u F_BB,u.
CMatrix signal_covariance_qtilde(std::span<const std::vector<CMatrix>> taps,
                                 std::span<const CMatrix> precoders, double symbol_variance);

/// Frequency-domain form (1/K) sum_k sum_u H_u[k] F_u[k] F_u[k]^H H_u[k]^H sigma_b^2,
/// valid for per-bin precoders. freq and precoders are [user][bin].
CMatrix signal_covariance_qtilde_from_bins(std::span<const std::vector<CMatrix>> freq,
                                           std::span<const std::vector<CMatrix>> precoders,
                                           double symbol_variance);

/// (1/K) sum_k W[k]^H Q[k] W[k] without forming the N_BS x N_BS matrices.
CMatrix combined_signal_covariance(std::span<const std::vector<CMatrix>> freq,
                                   std::span<const CMatrix> combiner_rf,
                                   std::span<const std::vector<CMatrix>> precoders,
                                   double symbol_variance);

struct NoiseCovariances {
    CMatrix quantization;  // R, diagonal
    CMatrix effective;     // C
};

/// R = xi(1-xi) diag(W^H Q W + sigma^2 W^H W), C = xi^2 sigma^2 W^H W + R.
NoiseCovariances noise_covariances(const CMatrix& w_rf, const CMatrix& qtilde, double xi,
                                   double noise_variance);

/// Same algebra from the precomputed terms W^H Q W and W^H W.
NoiseCovariances noise_covariances_from_terms(const CMatrix& combined_signal,
                                              const CMatrix& combiner_gram, double xi,
                                              double noise_variance);

struct QuantizationModel {
    AdcResolution adc;
    double distortion = 0.0;  // rho
    double gain = 1.0;        // xi
    CMatrix gain_matrix;      // A = xi I
    CMatrix signal_covariance;  // W^H Q W as seen by the ADCs
    CMatrix quantization_noise; // R
    CMatrix effective_noise;    // C
};

QuantizationModel make_quantization_model(AdcResolution adc, const CMatrix& combined_signal,
                                          const CMatrix& combiner_gram, double noise_variance);

} // namespace thz
