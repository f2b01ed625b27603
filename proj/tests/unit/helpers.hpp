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

#include <cmath>
#include <vector>

#include "thz/config.hpp"
#include "thz/numerics.hpp"

namespace thz::test {

inline CMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        m.col(c) = rng.complex_gaussian(rows, 1.0);
    return m;
}

inline std::vector<CVector> random_sequence(std::size_t len, Eigen::Index n, Rng& rng)
{
    std::vector<CVector> out;
    for (std::size_t i = 0; i < len; ++i)
        out.push_back(rng.complex_gaussian(n, 1.0));
    return out;
}

inline double rel_err(const CMatrix& a, const CMatrix& b)
{
    const double scale = std::max(b.norm(), 1e-300);
    return (a - b).norm() / scale;
}

// Two users, 12 BS antennas in two subarrays of six, K = 16.
inline SystemConfig small_config()
{
    SystemConfig c = default_config();
    c.num_users = 2;
    c.tx_antennas_per_user = 4;
    c.tx_rf_chains_per_user = 2;
    c.streams_per_user = 1;
    c.bs_antennas = 12;
    c.bs_rf_chains = 2;
    c.ttd_per_chain = 2;
    c.num_bins = 16;
    c.data_block_len = 13;
    c.channel_taps = 4;
    c.tx_grid_size = 8;
    c.rx_grid_size_per_subarray = 8;
    return validate(c);
}

} // namespace thz::test
