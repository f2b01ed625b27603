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

#include <vector>

#include "thz/numerics.hpp"

namespace thz {

struct Dictionary {
    CMatrix atoms;               // antennas x G, unit-norm columns
    std::vector<double> sines;   // steering parameter sin(theta), ascending
    std::vector<double> angles;  // asin of the above

    int size() const { return static_cast<int>(atoms.cols()); }
};

// Per-user hybrid precoder. rf/baseband hold the frequency-flat design; the
// per-bin vectors are filled once TTD is applied and take precedence.
struct HybridPrecoder {
    CMatrix rf;        // N_Tu x N_RFuT
    CMatrix baseband;  // N_RFuT x N_su
    std::vector<CMatrix> rf_per_bin;
    std::vector<CMatrix> baseband_per_bin;
    std::vector<int> selected_indices;
    std::vector<double> selected_sines;
    double residual = 0.0;  // ||F_opt - F_RF F_BB||_F before power scaling

    bool per_bin() const { return !rf_per_bin.empty(); }
    const CMatrix& rf_at(std::size_t k) const { return per_bin() ? rf_per_bin[k] : rf; }
    const CMatrix& baseband_at(std::size_t k) const
    {
        return baseband_per_bin.empty() ? baseband : baseband_per_bin[k];
    }
    CMatrix effective(std::size_t k) const { return rf_at(k) * baseband_at(k); }
};

struct HybridCombiner {
    CMatrix rf;  // N_BS x N_RFR, block-diagonal
    std::vector<CMatrix> rf_per_bin;
    std::vector<CMatrix> baseband;  // [bin] N_RFR x N_s
    std::vector<int> selected_indices;   // one per subarray
    std::vector<double> selected_sines;  // one per subarray
    std::vector<CMatrix> target;         // W_opt[k]
    std::vector<double> residual_history;

    bool per_bin() const { return !rf_per_bin.empty(); }
    const CMatrix& rf_at(std::size_t k) const { return per_bin() ? rf_per_bin[k] : rf; }
};

} // namespace thz
