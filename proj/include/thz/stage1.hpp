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

#include "thz/beamformer.hpp"
#include "thz/channel.hpp"
#include "thz/config.hpp"

namespace thz {

struct OptimalPrecoder {
    CMatrix columns;  // N_Tu x N_su
    bool rank_deficient = false;
};

/// Dominant right-singular vectors of h, each rotated so that its
/// largest-magnitude entry is real and positive. When h has fewer than
/// `streams` nonzero singular values the remaining columns come from the
/// null space and rank_deficient is set.
OptimalPrecoder per_bin_optimal_precoder(const CMatrix& h, int streams);

CMatrix average_precoder(std::span<const CMatrix> per_bin);

/// Grid of G steering parameters spanning sin(theta) in [-1, 1], endpoints included.
Dictionary build_dictionary(int antennas, int grid_size, double carrier_hz);

/// Greedy simultaneous OMP; baseband rescaled to ||F_RF F_BB||_F^2 = streams.
HybridPrecoder somp_precoder(const CMatrix& f_opt, const Dictionary& dict, int rf_chains);

/// W = H (H^H H + noise_variance * streams * I)^-1
CMatrix mmse_combiner_per_bin(const CMatrix& h_eq, double noise_variance, int streams);

/// One atom per subarray, chosen sequentially against the stacked per-bin
/// targets; baseband W_BB[k] = (1/xi) W_RF^H W_opt[k].
HybridCombiner spatially_sparse_combiner(std::span<const CMatrix> w_opt,
                                         const Dictionary& subarray_dict, int subarrays,
                                         double xi);

// --- whole-system helpers ---

/// Stage-1 precoder for every user from its per-bin channels.
std::vector<HybridPrecoder> design_precoders(const ChannelRealization& ch, const SystemConfig& cfg);

/// Block-diagonal N_T x N_s system precoder at bin k.
CMatrix system_precoder(std::span<const HybridPrecoder> precoders, std::size_t k);

/// W_opt[k] for every bin given the precoders in use.
std::vector<CMatrix> mmse_targets(const ChannelRealization& ch,
                                  std::span<const HybridPrecoder> precoders,
                                  const SystemConfig& cfg);

HybridCombiner design_combiner(const ChannelRealization& ch,
                               std::span<const HybridPrecoder> precoders, const SystemConfig& cfg,
                               double xi);

} // namespace thz
