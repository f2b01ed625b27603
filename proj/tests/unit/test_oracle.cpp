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
#include "thz/oracle.hpp"
#include "thz/pipeline.hpp"
#include "thz/stage1.hpp"

using namespace thz;
using thz::test::rel_err;
using thz::test::small_config;

namespace {

double seq_rel_err(const std::vector<CVector>& a, const std::vector<CVector>& b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]).squaredNorm();
        den += b[i].squaredNorm();
    }
    return std::sqrt(num / den);
}

// Sample covariance of received[k] over blocks, divided by K.
std::vector<CMatrix> received_covariance(const ChannelRealization& ch, const Transceiver& t, const SystemConfig& cfg,
                                         int blocks, OracleMode mode, Rng& rng)
{
    const std::size_t K = cfg.num_bins;
    std::vector<CMatrix> cov(K, CMatrix::Zero(cfg.total_streams, cfg.total_streams));
    const std::vector<CVector> silent(K, CVector::Zero(cfg.total_streams));
    for (int b = 0; b < blocks; ++b) {
        const auto out = time_domain_oracle(ch, t.precoders, t.combiner, cfg, silent, rng, {mode, true});
        for (std::size_t k = 0; k < K; ++k)
            cov[k] += out.received[k] * out.received[k].adjoint();
    }
    for (auto& c : cov)
        c /= double(blocks) * double(K);
    return cov;
}

} // namespace

TEST_CASE("noiseless ideal oracle equals the per-bin model")
{
    auto cfg = small_config();
    cfg.adc = AdcResolution::ideal();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng = Rng::stream(seed, {0});
        const auto ch = generate_channel(cfg, rng);
        for (Scheme s : {Scheme::proposed_ttd, Scheme::stage1_somp}) {
            const auto t = design_transceiver(ch, cfg, s);
            const auto symbols = zero_padded_block(cfg, rng);
            for (OracleMode mode : {OracleMode::direct, OracleMode::fft}) {
                const auto out = time_domain_oracle(ch, t.precoders, t.combiner, cfg, symbols, rng, {mode, false});
                const auto model = frequency_domain_model(ch, t.precoders, t.combiner, 1.0, out.symbols_freq);
                CHECK(seq_rel_err(out.received, model) < 1e-9);
                CHECK_FALSE(out.zero_input);
            }
        }
    }
}

TEST_CASE("zero-padded block layout")
{
    const auto cfg = small_config();
    Rng rng(1);
    const auto b = zero_padded_block(cfg, rng);
    REQUIRE(b.size() == 16);
    for (int n = 0; n < 16; ++n)
        CHECK((b[n].norm() == 0.0) == (n >= cfg.data_block_len));

    const auto ch = generate_channel(cfg, rng);
    const auto t = design_transceiver(ch, cfg, Scheme::stage1_somp);
    const std::vector<CVector> short_block(5, CVector::Zero(cfg.total_streams));
    CHECK_THROWS_AS(time_domain_oracle(ch, t.precoders, t.combiner, cfg, short_block, rng), LengthMismatch);
}

TEST_CASE("zero input leaves the effective noise")
{
    auto cfg = small_config();
    Rng rng = Rng::stream(12, {0});
    const auto ch = generate_channel(cfg, rng);

    SUBCASE("ideal ADC, antenna-domain noise")
    {
        cfg.adc = AdcResolution::ideal();
        const auto t = design_transceiver(ch, cfg, Scheme::proposed_ttd);
        const auto cov = received_covariance(ch, t, cfg, 4000, OracleMode::direct, rng);
        for (std::size_t k = 0; k < cov.size(); ++k) {
            const CMatrix expect = effective_noise_cov_per_bin(t.combiner.baseband[k], t.qmodel.effective_noise);
            CHECK(rel_err(cov[k], expect) < 0.08);
        }
    }
    SUBCASE("3-bit ADC")
    {
        cfg.adc = AdcResolution::bits(3);
        const auto t = design_transceiver(ch, cfg, Scheme::stage1_somp);
        const auto cov = received_covariance(ch, t, cfg, 4000, OracleMode::direct, rng);
        // the ADCs now see noise only
        const auto c0 = noise_covariances_from_terms(CMatrix::Zero(2, 2), t.gram_term, t.qmodel.gain, cfg.noise_variance);
        for (std::size_t k = 0; k < cov.size(); ++k) {
            const CMatrix expect = effective_noise_cov_per_bin(t.combiner.baseband[k], c0.effective);
            CHECK(rel_err(cov[k], expect) < 0.08);
        }
    }
}

TEST_CASE("per-chain quantization error follows the Bussgang prediction")
{
    auto cfg = small_config();
    cfg.adc = AdcResolution::bits(3);
    Rng rng = Rng::stream(21, {0});
    const auto ch = generate_channel(cfg, rng);
    const auto t = design_transceiver(ch, cfg, Scheme::proposed_ttd);
    const auto est = bussgang_monte_carlo(ch, t.precoders, t.combiner, cfg, 10000, rng);
    CHECK(est.samples_per_chain == 160000);
    for (Eigen::Index c = 0; c < est.error_variance.size(); ++c) {
        CAPTURE(c);
        CHECK(est.error_variance(c) == doctest::Approx(est.predicted_variance(c)).epsilon(0.05));
    }
    CHECK(est.max_abs_correlation < 0.01);
    CHECK_THROWS_AS(bussgang_monte_carlo(ch, t.precoders, t.combiner, cfg, 0, rng), ValueError);
}
