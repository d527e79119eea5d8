#include "mpirecon/convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "mpirecon/error.hpp"

namespace mpirecon {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

template <typename T>
struct FftwBuffer {
    T* ptr = nullptr;
    explicit FftwBuffer(std::size_t n) : ptr(static_cast<T*>(fftw_malloc(sizeof(T) * n))) {
        if (!ptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

long wrap(long d, std::size_t n) {
    const long m = static_cast<long>(n);
    return ((d % m) + m) % m;
}

}  // namespace

struct LinearConvolution::Impl {
    std::size_t nx = 0, ny = 0;  // grid
    std::size_t px = 0, py = 0;  // padded transform size
    std::size_t spectrum_size = 0;
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
    std::vector<std::vector<std::complex<double>>> spectra;

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
    }

    void transform(const double* in_real, std::vector<std::complex<double>>& out) const {
        FftwBuffer<double> real(px * py);
        FftwBuffer<fftw_complex> spec(spectrum_size);
        std::copy(in_real, in_real + px * py, real.ptr);
        fftw_execute_dft_r2c(forward, real.ptr, spec.ptr);
        out.resize(spectrum_size);
        for (std::size_t k = 0; k < spectrum_size; ++k) out[k] = {spec.ptr[k][0], spec.ptr[k][1]};
    }

    std::vector<std::complex<double>> transform_field(const ScalarField& x) const {
        std::vector<double> padded(px * py, 0.0);
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) padded[j * px + i] = x(i, j);
        std::vector<std::complex<double>> out;
        transform(padded.data(), out);
        return out;
    }

    ScalarField inverse_cropped(const std::vector<std::complex<double>>& spectrum) const {
        FftwBuffer<fftw_complex> spec(spectrum_size);
        FftwBuffer<double> real(px * py);
        for (std::size_t k = 0; k < spectrum_size; ++k) {
            spec.ptr[k][0] = spectrum[k].real();
            spec.ptr[k][1] = spectrum[k].imag();
        }
        fftw_execute_dft_c2r(inverse, spec.ptr, real.ptr);
        const double scale = 1.0 / static_cast<double>(px * py);
        ScalarField out(nx, ny);
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) out(i, j) = real.ptr[j * px + i] * scale;
        return out;
    }
};

std::size_t LinearConvolution::fast_size(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

LinearConvolution::LinearConvolution(std::size_t nx, std::size_t ny, const Stencil& stencil)
    : LinearConvolution(nx, ny, std::vector<Stencil>{stencil}) {}

LinearConvolution::LinearConvolution(std::size_t nx, std::size_t ny,
                                     const std::vector<Stencil>& stencils)
    : impl_(std::make_unique<Impl>()) {
    detail::require(nx >= 1 && ny >= 1, "LinearConvolution: empty grid");
    detail::require(!stencils.empty(), "LinearConvolution: no stencil");
    auto& d = *impl_;
    d.nx = nx;
    d.ny = ny;
    d.px = fast_size(2 * nx - 1);
    d.py = fast_size(2 * ny - 1);
    d.spectrum_size = d.py * (d.px / 2 + 1);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        FftwBuffer<double> real(d.px * d.py);
        FftwBuffer<fftw_complex> spec(d.spectrum_size);
        const int dims[2] = {static_cast<int>(d.py), static_cast<int>(d.px)};
        d.forward = fftw_plan_dft_r2c(2, dims, real.ptr, spec.ptr, FFTW_ESTIMATE);
        d.inverse = fftw_plan_dft_c2r(2, dims, spec.ptr, real.ptr, FFTW_ESTIMATE);
        if (!d.forward || !d.inverse) throw NumericalError("LinearConvolution: FFTW planning failed");
    }
    const long mx = static_cast<long>(nx) - 1;
    const long my = static_cast<long>(ny) - 1;
    std::vector<double> embedded(d.px * d.py);
    for (const auto& stencil : stencils) {
        std::fill(embedded.begin(), embedded.end(), 0.0);
        for (long dj = -my; dj <= my; ++dj)
            for (long di = -mx; di <= mx; ++di)
                embedded[static_cast<std::size_t>(wrap(dj, d.py)) * d.px +
                         static_cast<std::size_t>(wrap(di, d.px))] = stencil(di, dj);
        d.spectra.emplace_back();
        d.transform(embedded.data(), d.spectra.back());
    }
}

LinearConvolution::~LinearConvolution() = default;
LinearConvolution::LinearConvolution(LinearConvolution&&) noexcept = default;
LinearConvolution& LinearConvolution::operator=(LinearConvolution&&) noexcept = default;

std::size_t LinearConvolution::nx() const { return impl_->nx; }
std::size_t LinearConvolution::ny() const { return impl_->ny; }
std::size_t LinearConvolution::stencil_count() const { return impl_->spectra.size(); }

ScalarField LinearConvolution::apply(const ScalarField& x, std::size_t stencil) const {
    detail::require(x.nx() == impl_->nx && x.ny() == impl_->ny, "LinearConvolution: shape mismatch");
    detail::require(stencil < impl_->spectra.size(), "LinearConvolution: stencil index");
    auto spec = impl_->transform_field(x);
    const auto& k = impl_->spectra[stencil];
    for (std::size_t q = 0; q < spec.size(); ++q) spec[q] *= k[q];
    return impl_->inverse_cropped(spec);
}

ScalarField LinearConvolution::adjoint(const ScalarField& y, std::size_t stencil) const {
    detail::require(y.nx() == impl_->nx && y.ny() == impl_->ny, "LinearConvolution: shape mismatch");
    detail::require(stencil < impl_->spectra.size(), "LinearConvolution: stencil index");
    auto spec = impl_->transform_field(y);
    const auto& k = impl_->spectra[stencil];
    for (std::size_t q = 0; q < spec.size(); ++q) spec[q] *= std::conj(k[q]);
    return impl_->inverse_cropped(spec);
}

std::vector<ScalarField> LinearConvolution::apply_many(const ScalarField& x) const {
    detail::require(x.nx() == impl_->nx && x.ny() == impl_->ny, "LinearConvolution: shape mismatch");
    const auto spec = impl_->transform_field(x);
    std::vector<ScalarField> out;
    std::vector<std::complex<double>> prod(spec.size());
    for (const auto& k : impl_->spectra) {
        for (std::size_t q = 0; q < spec.size(); ++q) prod[q] = spec[q] * k[q];
        out.push_back(impl_->inverse_cropped(prod));
    }
    return out;
}

ScalarField LinearConvolution::apply_direct(const ScalarField& x, const Stencil& stencil) {
    ScalarField out(x.nx(), x.ny());
    const long nx = static_cast<long>(x.nx());
    const long ny = static_cast<long>(x.ny());
    for (long j = 0; j < ny; ++j)
        for (long i = 0; i < nx; ++i) {
            double acc = 0.0;
            for (long jj = 0; jj < ny; ++jj)
                for (long ii = 0; ii < nx; ++ii) acc += stencil(i - ii, j - jj) * x(ii, jj);
            out(i, j) = acc;
        }
    return out;
}

}  // namespace mpirecon
