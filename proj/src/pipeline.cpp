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

#include "thz/pipeline.hpp"

#include "thz/errors.hpp"
#include "thz/metrics.hpp"
#include "thz/stage1.hpp"
#include "thz/stage2.hpp"

namespace thz {

std::string to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::proposed_ttd:
        return "proposed-ttd";
    case Scheme::stage1_only:
        return "stage1-only";
    case Scheme::stage1_somp:
        return "stage1-somp";
    case Scheme::fully_digital:
        return "fully-digital-ideal-adc";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view text)
{
    if (text == "proposed-ttd")
        return Scheme::proposed_ttd;
    if (text == "stage1-only")
        return Scheme::stage1_only;
    if (text == "stage1-somp")
        return Scheme::stage1_somp;
    if (text == "fully-digital-ideal-adc")
        return Scheme::fully_digital;
    throw ValueError("unknown scheme '" + std::string(text) + "'");
}

Transceiver design_transceiver(const ChannelRealization& ch, const SystemConfig& cfg, Scheme scheme,
                               const std::vector<HybridPrecoder>& stage1_precoders)
{
    if (scheme == Scheme::fully_digital)
        throw ValueError("the fully digital reference has no hybrid transceiver");
    const double xi = bussgang_gain(cfg.adc);

    Transceiver t;
    t.precoders = stage1_precoders;
    t.combiner = design_combiner(ch, t.precoders, cfg, xi);
    if (scheme == Scheme::proposed_ttd) {
        for (std::size_t u = 0; u < t.precoders.size(); ++u)
            t.precoders[u] = ttd_precoder_per_bin(ch.freq[u], stage1_precoders[u], cfg);
        t.combiner = ttd_combiner_per_bin(t.combiner, ch, t.precoders, cfg, xi);
    } else if (scheme == Scheme::stage1_only) {
        for (std::size_t u = 0; u < t.precoders.size(); ++u)
            t.precoders[u] = flat_precoder_per_bin(ch.freq[u], stage1_precoders[u]);
        t.combiner = flat_combiner_per_bin(t.combiner, ch, t.precoders, cfg, xi);
    }
    const auto terms = receiver_terms(ch, t.precoders, t.combiner, cfg);
    t.signal_term = terms.signal;
    t.gram_term = terms.gram;
    t.qmodel = make_quantization_model(cfg.adc, t.signal_term, t.gram_term, cfg.noise_variance);
    t.chain_gain.reserve(ch.mu.size());
    for (std::size_t k = 0; k < ch.mu.size(); ++k)
        t.chain_gain.push_back(t.combiner.rf_at(k).adjoint() * (ch.mu[k] * system_precoder(t.precoders, k)));
    return t;
}

void set_resolution(Transceiver& t, AdcResolution adc, const SystemConfig& cfg)
{
    const double old_gain = t.qmodel.gain;
    t.qmodel = make_quantization_model(adc, t.signal_term, t.gram_term, cfg.noise_variance);
    const double ratio = old_gain / t.qmodel.gain;
    for (auto& w : t.combiner.baseband)
        w *= ratio;
}

double transceiver_spectral_efficiency(const Transceiver& t, const SystemConfig& cfg)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < t.chain_gain.size(); ++k) {
        const CMatrix& w_bb = t.combiner.baseband[k];
        const CMatrix g = t.qmodel.gain * (w_bb.adjoint() * t.chain_gain[k]);
        const CMatrix s = cfg.symbol_variance * g * g.adjoint();
        const CMatrix c = effective_noise_cov_per_bin(w_bb, t.qmodel.effective_noise);
        sum += bin_spectral_efficiency(s, c, cfg.total_streams);
    }
    return sum / static_cast<double>(t.chain_gain.size());
}

Transceiver design_transceiver(const ChannelRealization& ch, const SystemConfig& cfg, Scheme scheme)
{
    return design_transceiver(ch, cfg, scheme, design_precoders(ch, cfg));
}

double scheme_spectral_efficiency(const ChannelRealization& ch, const SystemConfig& cfg, Scheme scheme)
{
    if (scheme == Scheme::fully_digital)
        return fully_digital_spectral_efficiency(ch, cfg);
    const auto t = design_transceiver(ch, cfg, scheme);
    return sum_spectral_efficiency(ch, t.precoders, t.combiner, t.qmodel, cfg);
}

} // namespace thz
