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

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace thz {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double speed_of_light = 299792458.0;

// ---------- Sequence transforms ----------
//
// Forward: X[p] = sum_n x[n] exp(-j 2 pi n p / K). Inverse carries the 1/K.

std::vector<CVector> dft_sequence(std::span<const CVector> seq, std::size_t length);
std::vector<CVector> idft_sequence(std::span<const CVector> seq, std::size_t length);
std::vector<CMatrix> dft_sequence(std::span<const CMatrix> seq, std::size_t length);
std::vector<CMatrix> idft_sequence(std::span<const CMatrix> seq, std::size_t length);

/// r(n) = sum_l H(l) x((n - l) mod K), no noise term.
std::vector<CVector> circular_convolve(std::span<const CMatrix> taps, std::span<const CVector> x,
                                       std::size_t length);

// ---------- Dense linear algebra ----------

struct SvdResult {
    CMatrix u;                // m x p, p = min(m, n)
    RVector singular_values;  // nonincreasing, length p
    CMatrix v;                // n x p
};

/// Thin SVD, a = u * diag(s) * v^H.
SvdResult svd(const CMatrix& a);

/// Solves a * x = b for Hermitian positive definite a. Throws NotPositiveDefinite.
CMatrix hermitian_solve(const CMatrix& a, const CMatrix& b);

/// log(det(a)) for Hermitian positive definite a (natural log).
double log_det_hpd(const CMatrix& a);

CMatrix block_diagonal(std::span<const CMatrix> blocks);

bool all_finite(const CMatrix& a);

// ---------- Random numbers ----------

/// Counter-free stream derivation: every (seed, path...) tuple names an
/// independent generator, so trials can run in any order.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    {
        return Rng(derive_seed(seed, path));
    }

    double uniform(double lo, double hi);
    double normal();

    /// CN(0, variance): independent real/imaginary parts of variance/2 each.
    Complex complex_gaussian(double variance);
    CVector complex_gaussian(Eigen::Index n, double variance);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace thz
