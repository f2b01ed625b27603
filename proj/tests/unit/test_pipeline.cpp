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


#include <doctest.h>

#include "helpers.hpp"
#include "thz/channel.hpp"
#include "thz/errors.hpp"
#include "thz/metrics.hpp"
#include "thz/pipeline.hpp"
#include "thz/stage1.hpp"

using namespace thz;
using thz::test::rel_err;
using thz::test::small_config;

TEST_CASE("scheme names")
{
    for (Scheme s : {Scheme::proposed_ttd, Scheme::stage1_only, Scheme::stage1_somp, Scheme::fully_digital})
        CHECK(parse_scheme(to_string(s)) == s);
    CHECK(to_string(Scheme::fully_digital) == "fully-digital-ideal-adc");
    CHECK_THROWS_AS(parse_scheme("dpp"), ValueError);
}

TEST_CASE("transceivers for each hybrid scheme")
{
    const auto cfg = small_config();
    Rng rng = Rng::stream(4, {0});
    const auto ch = generate_channel(cfg, rng);
    const auto stage1 = design_precoders(ch, cfg);

    CHECK_THROWS_AS(design_transceiver(ch, cfg, Scheme::fully_digital), ValueError);

    const auto ttd = design_transceiver(ch, cfg, Scheme::proposed_ttd, stage1);
    CHECK(ttd.combiner.per_bin());
    CHECK(ttd.precoders[0].per_bin());
    const auto flat = design_transceiver(ch, cfg, Scheme::stage1_only, stage1);
    CHECK(flat.combiner.per_bin());
    for (std::size_t k = 0; k < ch.mu.size(); ++k)
        CHECK(flat.combiner.rf_at(k) == flat.combiner.rf);
    const auto somp = design_transceiver(ch, cfg, Scheme::stage1_somp, stage1);
    CHECK_FALSE(somp.combiner.per_bin());
    CHECK_FALSE(somp.precoders[0].per_bin());

    // the three share the stage-1 selections
    CHECK(ttd.combiner.selected_indices == somp.combiner.selected_indices);
    CHECK(flat.precoders[1].selected_indices == stage1[1].selected_indices);

    // cached evaluation agrees with the generic one
    for (const auto* t : {&ttd, &flat, &somp}) {
        const double a = transceiver_spectral_efficiency(*t, cfg);
        const double b = sum_spectral_efficiency(ch, t->precoders, t->combiner, t->qmodel, cfg);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
        CHECK(a > 0.0);
    }
    CHECK(scheme_spectral_efficiency(ch, cfg, Scheme::proposed_ttd) ==
          doctest::Approx(transceiver_spectral_efficiency(ttd, cfg)).epsilon(1e-12));
}

TEST_CASE("switching ADC resolution equals a fresh design")
{
    auto cfg = small_config();
    Rng rng = Rng::stream(6, {0});
    const auto ch = generate_channel(cfg, rng);
    const auto stage1 = design_precoders(ch, cfg);
    for (Scheme s : {Scheme::proposed_ttd, Scheme::stage1_only, Scheme::stage1_somp}) {
        auto t = design_transceiver(ch, cfg, s, stage1);
        double prev = 0.0;
        for (AdcResolution a : {AdcResolution::bits(1), AdcResolution::bits(2), AdcResolution::bits(4),
                                AdcResolution::bits(8), AdcResolution::ideal()}) {
            set_resolution(t, a, cfg);
            auto fresh_cfg = cfg;
            fresh_cfg.adc = a;
            const auto fresh = design_transceiver(ch, fresh_cfg, s, stage1);
            const double se = transceiver_spectral_efficiency(t, cfg);
            CHECK(se == doctest::Approx(transceiver_spectral_efficiency(fresh, fresh_cfg)).epsilon(1e-10));
            for (std::size_t k = 0; k < ch.mu.size(); ++k)
                CHECK(rel_err(t.combiner.baseband[k], fresh.combiner.baseband[k]) < 1e-12);
            CHECK(se >= prev);
            prev = se;
        }
    }
}
