#pragma once
// Cached FFT plans. Plans are created once per size under a global lock with
// deterministic planning flags; executions run concurrently on caller-owned
// buffers (new-array interface, no alignment assumptions).

#include <complex>

namespace pv {

class Fft2D {
  public:
    explicit Fft2D(int N);
    ~Fft2D();
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    void forward(std::complex<double>* inout) const;
    void inverse(std::complex<double>* inout) const;  // unscaled, divide by N*N
    int size() const { return N_; }

  private:
    int N_;
    void* fwd_;
    void* inv_;
};

class Fft1D {
  public:
    explicit Fft1D(int N);
    ~Fft1D();
    Fft1D(const Fft1D&) = delete;
    Fft1D& operator=(const Fft1D&) = delete;

    void forward(std::complex<double>* inout) const;
    void inverse(std::complex<double>* inout) const;  // unscaled, divide by N
    int size() const { return N_; }

  private:
    int N_;
    void* fwd_;
    void* inv_;
};

const Fft2D& fft2d_plan(int N);
const Fft1D& fft1d_plan(int N);

}  // namespace pv
