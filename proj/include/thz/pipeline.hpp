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

#include <string>
#include <string_view>
#include <vector>

#include "thz/beamformer.hpp"
#include "thz/channel.hpp"
#include "thz/config.hpp"
#include "thz/quantization.hpp"

namespace thz {

enum class Scheme {
    proposed_ttd,   // stage 1 followed by TTD compensation on both ends
    stage1_only,    // same per-bin digital stage, RF left frequency-flat
    stage1_somp,    // stage-1 output as designed: flat SOMP baseband
    fully_digital,  // per-bin SVD reference, ideal ADCs
};

std::string to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

struct Transceiver {
    std::vector<HybridPrecoder> precoders;
    HybridCombiner combiner;
    QuantizationModel qmodel;

    // cached so the ADC resolution can change without a redesign
    std::vector<CMatrix> chain_gain;  // W_RF[k]^H H_MU[k] F[k]
    CMatrix signal_term;
    CMatrix gram_term;
};

/// Hybrid designs only; fully_digital has no hybrid transceiver.
Transceiver design_transceiver(const ChannelRealization& ch, const SystemConfig& cfg, Scheme scheme);

/// Same, reusing stage-1 precoders already designed for this channel.
Transceiver design_transceiver(const ChannelRealization& ch, const SystemConfig& cfg, Scheme scheme,
                               const std::vector<HybridPrecoder>& stage1_precoders);

/// Switches the ADC model: W_BB is rescaled for the new Bussgang gain and the
/// covariances are rebuilt from the cached terms.
void set_resolution(Transceiver& t, AdcResolution adc, const SystemConfig& cfg);

/// Sum spectral efficiency from the cached per-bin chain gains.
double transceiver_spectral_efficiency(const Transceiver& t, const SystemConfig& cfg);

/// Sum spectral efficiency of a scheme on one realization, bits/s/Hz.
double scheme_spectral_efficiency(const ChannelRealization& ch, const SystemConfig& cfg, Scheme scheme);

} // namespace thz
