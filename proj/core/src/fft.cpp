#include "thermovitals/fft.hpp"

#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace thermovitals {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

struct RealFft::Impl {
    size_t n = 0;
    fftw_plan plan = nullptr;

    explicit Impl(size_t size) : n(size) {
        if (n == 0)
            throw std::invalid_argument("RealFft: size must be positive");
        std::lock_guard lock(planner_mutex());
        std::vector<double> in(n);
        std::vector<std::complex<double>> out(n / 2 + 1);
        // FFTW_UNALIGNED lets the new-array execute run on caller buffers
        // without SIMD alignment requirements.
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan)
            throw std::runtime_error("RealFft: planning failed");
    }

    ~Impl() {
        if (plan) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
};

RealFft::RealFft(size_t n) : impl_(std::make_unique<Impl>(n)) {}
RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&& other) noexcept = default;
RealFft& RealFft::operator=(RealFft&& other) noexcept = default;

size_t RealFft::size() const { return impl_->n; }
size_t RealFft::bins() const { return impl_->n / 2 + 1; }

void RealFft::transform(const double* in, std::complex<double>* out) const {
    fftw_execute_dft_r2c(impl_->plan, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

struct Fft2d::Impl {
    size_t rows = 0;
    size_t cols = 0;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    mutable std::vector<std::complex<double>> scratch; // c2r destroys its input

    Impl(size_t r, size_t c) : rows(r), cols(c), scratch(r * (c / 2 + 1)) {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("Fft2d: dimensions must be positive");
        std::lock_guard lock(planner_mutex());
        std::vector<double> real(rows * cols);
        std::vector<std::complex<double>> cplx(rows * (cols / 2 + 1));
        fwd = fftw_plan_dft_r2c_2d(static_cast<int>(rows), static_cast<int>(cols), real.data(),
                                   reinterpret_cast<fftw_complex*>(cplx.data()),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
        inv = fftw_plan_dft_c2r_2d(static_cast<int>(rows), static_cast<int>(cols),
                                   reinterpret_cast<fftw_complex*>(cplx.data()), real.data(),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!fwd || !inv)
            throw std::runtime_error("Fft2d: planning failed");
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
    }
};

Fft2d::Fft2d(size_t rows, size_t cols) : impl_(std::make_unique<Impl>(rows, cols)) {}
Fft2d::~Fft2d() = default;
Fft2d::Fft2d(Fft2d&& other) noexcept = default;
Fft2d& Fft2d::operator=(Fft2d&& other) noexcept = default;

size_t Fft2d::rows() const { return impl_->rows; }
size_t Fft2d::cols() const { return impl_->cols; }
size_t Fft2d::spectrum_size() const { return impl_->rows * (impl_->cols / 2 + 1); }

void Fft2d::forward(const double* in, std::complex<double>* out) const {
    fftw_execute_dft_r2c(impl_->fwd, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void Fft2d::inverse(const std::complex<double>* in, double* out) const {
    impl_->scratch.assign(in, in + spectrum_size());
    fftw_execute_dft_c2r(impl_->inv,
                         reinterpret_cast<fftw_complex*>(impl_->scratch.data()), out);
    const double scale = 1.0 / (static_cast<double>(impl_->rows) * impl_->cols);
    const size_t n = impl_->rows * impl_->cols;
    for (size_t i = 0; i < n; ++i)
        out[i] *= scale;
}

} // namespace thermovitals
