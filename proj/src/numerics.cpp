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

#include "thz/numerics.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/FFT>

#include "thz/errors.hpp"

namespace thz {

namespace {

Eigen::FFT<double>& fft_engine()
{
    thread_local Eigen::FFT<double> engine;
    return engine;
}

template <typename Seq>
void check_sequence(const Seq& seq, std::size_t length, const char* what)
{
    if (seq.size() != length)
        throw LengthMismatch(std::string(what) + ": expected " + std::to_string(length) +
                             " elements, got " + std::to_string(seq.size()));
    if (length == 0)
        throw LengthMismatch(std::string(what) + ": empty sequence");
    for (const auto& item : seq) {
        if (item.rows() != seq[0].rows() || item.cols() != seq[0].cols())
            throw LengthMismatch(std::string(what) + ": elements differ in shape");
    }
}

// Transforms every entry position of a sequence of equally shaped objects.
template <typename T>
std::vector<T> transform_sequence(std::span<const T> seq, std::size_t length, bool inverse)
{
    check_sequence(seq, length, inverse ? "idft_sequence" : "dft_sequence");
    const Eigen::Index rows = seq[0].rows();
    const Eigen::Index cols = seq[0].cols();
    std::vector<T> out(length, T::Zero(rows, cols));
    if (length == 1) {
        // kissfft crashes on a single point; the transform is the identity anyway
        out[0] = seq[0];
        return out;
    }

    auto& engine = fft_engine();
    std::vector<Complex> in_buf(length), out_buf(length);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (std::size_t n = 0; n < length; ++n)
                in_buf[n] = seq[n](r, c);
            if (inverse)
                engine.inv(out_buf, in_buf);
            else
                engine.fwd(out_buf, in_buf);
            for (std::size_t n = 0; n < length; ++n)
                out[n](r, c) = out_buf[n];
        }
    }
    return out;
}

} // namespace

std::vector<CVector> dft_sequence(std::span<const CVector> seq, std::size_t length)
{
    return transform_sequence(seq, length, false);
}

std::vector<CVector> idft_sequence(std::span<const CVector> seq, std::size_t length)
{
    return transform_sequence(seq, length, true);
}

std::vector<CMatrix> dft_sequence(std::span<const CMatrix> seq, std::size_t length)
{
    return transform_sequence(seq, length, false);
}

std::vector<CMatrix> idft_sequence(std::span<const CMatrix> seq, std::size_t length)
{
    return transform_sequence(seq, length, true);
}

std::vector<CVector> circular_convolve(std::span<const CMatrix> taps, std::span<const CVector> x,
                                       std::size_t length)
{
    if (taps.size() != length || x.size() != length || length == 0)
        throw ShapeMismatch("circular_convolve: both sequences need exactly K elements");
    const Eigen::Index rows = taps[0].rows();
    const Eigen::Index cols = taps[0].cols();
    for (const auto& h : taps) {
        if (h.rows() != rows || h.cols() != cols)
            throw ShapeMismatch("circular_convolve: taps differ in shape");
    }
    for (const auto& v : x) {
        if (v.size() != cols)
            throw ShapeMismatch("circular_convolve: input length does not match tap columns");
    }

    std::vector<CVector> r(length, CVector::Zero(rows));
    for (std::size_t n = 0; n < length; ++n) {
        for (std::size_t l = 0; l < length; ++l)
            r[n].noalias() += taps[l] * x[(n + length - l) % length];
    }
    return r;
}

SvdResult svd(const CMatrix& a)
{
    if (a.size() == 0)
        throw ShapeMismatch("svd of an empty matrix");
    if (!all_finite(a))
        throw ValueError("svd input has non-finite entries");
    Eigen::JacobiSVD<CMatrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success)
        throw ConvergenceFailure("Jacobi SVD did not converge");
    return SvdResult{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

CMatrix hermitian_solve(const CMatrix& a, const CMatrix& b)
{
    if (a.rows() != a.cols() || a.rows() != b.rows())
        throw ShapeMismatch("hermitian_solve: incompatible shapes");
    if (!all_finite(a) || !all_finite(b))
        throw ValueError("hermitian_solve: non-finite input");
    const double scale = a.cwiseAbs().maxCoeff();
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1e-300))
        throw NotPositiveDefinite("hermitian_solve: matrix is not Hermitian");

    Eigen::LLT<CMatrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("hermitian_solve: Cholesky factorization failed");
    const auto& l = llt.matrixL();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        if (!(std::real(l(i, i)) > 1e-150))
            throw NotPositiveDefinite("hermitian_solve: matrix is numerically singular");
    }
    CMatrix x = llt.solve(b);
    // One step of iterative refinement.
    x += llt.solve(b - a * x);
    return x;
}

double log_det_hpd(const CMatrix& a)
{
    Eigen::LLT<CMatrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("log_det_hpd: Cholesky factorization failed");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double d = std::real(llt.matrixL()(i, i));
        if (!(d > 0.0))
            throw NotPositiveDefinite("log_det_hpd: singular matrix");
        sum += std::log(d);
    }
    return 2.0 * sum;
}

CMatrix block_diagonal(std::span<const CMatrix> blocks)
{
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    CMatrix out = CMatrix::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

bool all_finite(const CMatrix& a)
{
    return a.allFinite();
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
{
    // splitmix64 finalizer chained over the path components
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(seed);
    for (std::uint64_t p : path)
        h = mix(h ^ mix(p + 0x632be59bd9b4e019ULL));
    return h;
}

double Rng::uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::normal()
{
    return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

Complex Rng::complex_gaussian(double variance)
{
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

CVector Rng::complex_gaussian(Eigen::Index n, double variance)
{
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = complex_gaussian(variance);
    return v;
}

} // namespace thz
