#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace thermovitals {

/// Fixed-size real-to-complex FFT. A constructed instance is immutable and
/// transform() may be called from many threads at once on distinct buffers,
/// which is what the per-pixel estimator relies on.
class RealFft {
public:
    explicit RealFft(size_t n);
    ~RealFft();
    RealFft(RealFft&& other) noexcept;
    RealFft& operator=(RealFft&& other) noexcept;
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    size_t size() const;
    /// Number of one-sided bins, size()/2 + 1.
    size_t bins() const;

    /// in: size() reals, out: bins() complex values (unnormalized DFT).
    void transform(const double* in, std::complex<double>* out) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Fixed-size 2D real FFT pair for the tracker. Spectra are half-complex:
/// rows x (cols/2 + 1), row-major. Not thread-safe; each tracker owns one.
class Fft2d {
public:
    Fft2d(size_t rows, size_t cols);
    ~Fft2d();
    Fft2d(Fft2d&& other) noexcept;
    Fft2d& operator=(Fft2d&& other) noexcept;
    Fft2d(const Fft2d&) = delete;
    Fft2d& operator=(const Fft2d&) = delete;

    size_t rows() const;
    size_t cols() const;
    size_t spectrum_size() const; // rows * (cols/2 + 1)

    /// in: rows*cols reals, out: spectrum_size() complex (unnormalized).
    void forward(const double* in, std::complex<double>* out) const;

    /// in: spectrum_size() complex, out: rows*cols reals, normalized so that
    /// inverse(forward(x)) == x.
    void inverse(const std::complex<double>* in, double* out) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace thermovitals
