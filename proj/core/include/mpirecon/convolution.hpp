#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "mpirecon/grid.hpp"

namespace mpirecon {

/// Linear (zero-padded, non-periodic) convolution on a cell-centered grid,
/// applied through FFTs on a padded grid large enough to avoid wraparound.
///
///   (C x)(i, j) = sum_{i', j'} k(i - i', j - j') x(i', j')
///
/// where k(di, dj) is the stencil sampled at grid offsets. The adjoint is the
/// matching correlation. Several stencils can share one transform of the
/// input via apply_many.
class LinearConvolution {
public:
    using Stencil = std::function<double(long di, long dj)>;

    LinearConvolution(std::size_t nx, std::size_t ny, const Stencil& stencil);
    LinearConvolution(std::size_t nx, std::size_t ny, const std::vector<Stencil>& stencils);
    ~LinearConvolution();

    LinearConvolution(LinearConvolution&&) noexcept;
    LinearConvolution& operator=(LinearConvolution&&) noexcept;
    LinearConvolution(const LinearConvolution&) = delete;
    LinearConvolution& operator=(const LinearConvolution&) = delete;

    std::size_t nx() const;
    std::size_t ny() const;
    std::size_t stencil_count() const;

    ScalarField apply(const ScalarField& x, std::size_t stencil = 0) const;
    ScalarField adjoint(const ScalarField& y, std::size_t stencil = 0) const;

    /// One forward transform of x, then every stencil applied.
    std::vector<ScalarField> apply_many(const ScalarField& x) const;

    /// Direct O(n^4) summation; intended for tests on small grids.
    static ScalarField apply_direct(const ScalarField& x, const Stencil& stencil);

    /// Smallest size >= n whose prime factors are 2, 3, 5 or 7.
    static std::size_t fast_size(std::size_t n);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace mpirecon
