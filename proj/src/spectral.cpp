#include "planevortex/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace pv {

// One mutex guards plan creation (not thread-safe in FFTW) and the caches.
static std::mutex plan_mutex;

static fftw_complex* as_fftw(std::complex<double>* p) {
    return reinterpret_cast<fftw_complex*>(p);
}

Fft2D::Fft2D(int N) : N_(N) {
    if (N < 2) throw std::invalid_argument("fft size");
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(N) * N);
    // FFTW_UNALIGNED: plans must accept arbitrary caller buffers.
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_2d(N, N, as_fftw(scratch.data()), as_fftw(scratch.data()),
                            FFTW_FORWARD, flags);
    inv_ = fftw_plan_dft_2d(N, N, as_fftw(scratch.data()), as_fftw(scratch.data()),
                            FFTW_BACKWARD, flags);
    if (!fwd_ || !inv_) throw std::runtime_error("fftw plan creation failed");
}

Fft2D::~Fft2D() {
    std::lock_guard<std::mutex> lk(plan_mutex);
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void Fft2D::forward(std::complex<double>* x) const {
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), as_fftw(x), as_fftw(x));
}

void Fft2D::inverse(std::complex<double>* x) const {
    fftw_execute_dft(static_cast<fftw_plan>(inv_), as_fftw(x), as_fftw(x));
}

Fft1D::Fft1D(int N) : N_(N) {
    if (N < 2) throw std::invalid_argument("fft size");
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(N));
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_1d(N, as_fftw(scratch.data()), as_fftw(scratch.data()),
                            FFTW_FORWARD, flags);
    inv_ = fftw_plan_dft_1d(N, as_fftw(scratch.data()), as_fftw(scratch.data()),
                            FFTW_BACKWARD, flags);
    if (!fwd_ || !inv_) throw std::runtime_error("fftw plan creation failed");
}

Fft1D::~Fft1D() {
    std::lock_guard<std::mutex> lk(plan_mutex);
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void Fft1D::forward(std::complex<double>* x) const {
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), as_fftw(x), as_fftw(x));
}

void Fft1D::inverse(std::complex<double>* x) const {
    fftw_execute_dft(static_cast<fftw_plan>(inv_), as_fftw(x), as_fftw(x));
}

const Fft2D& fft2d_plan(int N) {
    std::lock_guard<std::mutex> lk(plan_mutex);
    static std::map<int, std::unique_ptr<Fft2D>> cache;
    auto& slot = cache[N];
    if (!slot) slot = std::make_unique<Fft2D>(N);
    return *slot;
}

const Fft1D& fft1d_plan(int N) {
    std::lock_guard<std::mutex> lk(plan_mutex);
    static std::map<int, std::unique_ptr<Fft1D>> cache;
    auto& slot = cache[N];
    if (!slot) slot = std::make_unique<Fft1D>(N);
    return *slot;
}

}  // namespace pv
