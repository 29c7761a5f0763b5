#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <fftw3.h>

#include "mwell/error.hpp"

namespace mwell {

using cplx = std::complex<double>;

/// In-place complex FFT over a 1D or 2D (row-major, x fastest) array.
///
/// Unnormalized in both directions, FFTW sign conventions: forward uses
/// exp(-i k x), backward exp(+i k x). Plans are made with FFTW_ESTIMATE and
/// FFTW_UNALIGNED so one plan can execute on any buffer of the right length.
/// Plan creation is not thread-safe (FFTW planner restriction); execution is.
class FftPlan {
public:
    FftPlan() = default;

    explicit FftPlan(std::size_t n) : FftPlan(1, n) {}

    FftPlan(std::size_t ny, std::size_t nx) : nx_(nx), ny_(ny)
    {
        std::vector<cplx> scratch(nx * ny);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (ny == 1) {
            forward_ = wrap(fftw_plan_dft_1d(static_cast<int>(nx), buf, buf, FFTW_FORWARD, flags));
            backward_ = wrap(fftw_plan_dft_1d(static_cast<int>(nx), buf, buf, FFTW_BACKWARD, flags));
        } else {
            forward_ = wrap(fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), buf, buf,
                                             FFTW_FORWARD, flags));
            backward_ = wrap(fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), buf, buf,
                                              FFTW_BACKWARD, flags));
        }
        detail::require(forward_ && backward_, ErrorKind::domain, "fft", "FFTW plan creation failed");
    }

    std::size_t size() const { return nx_ * ny_; }

    void forward(std::span<cplx> data) const { run(forward_.get(), data); }
    void backward(std::span<cplx> data) const { run(backward_.get(), data); }

private:
    using PlanPtr = std::shared_ptr<fftw_plan_s>;

    static PlanPtr wrap(fftw_plan p)
    {
        if (p == nullptr)
            return {};
        return PlanPtr(p, fftw_destroy_plan);
    }

    void run(fftw_plan plan, std::span<cplx> data) const
    {
        detail::require(data.size() == size(), ErrorKind::grid_mismatch, "fft",
                        "buffer length does not match the plan");
        auto* buf = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(plan, buf, buf);
    }

    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    PlanPtr forward_;
    PlanPtr backward_;
};

/// 2D DCT-II (FFTW REDFT10) of a row-major ny x nx array:
/// Y[m][n] = 4 sum_j sum_l X[j][l] cos(pi m (j+1/2)/ny) cos(pi n (l+1/2)/nx).
inline std::vector<double> dct2_2d(std::vector<double> data, std::size_t ny, std::size_t nx)
{
    detail::require(data.size() == nx * ny, ErrorKind::grid_mismatch, "fft", "DCT buffer size mismatch");
    std::vector<double> out(nx * ny);
    fftw_plan p = fftw_plan_r2r_2d(static_cast<int>(ny), static_cast<int>(nx), data.data(), out.data(), FFTW_REDFT10,
                                   FFTW_REDFT10, FFTW_ESTIMATE);
    detail::require(p != nullptr, ErrorKind::domain, "fft", "FFTW DCT plan creation failed");
    fftw_execute(p);
    fftw_destroy_plan(p);
    return out;
}

/// Signed FFT frequency index for bin j of an n-point transform.
inline long signed_index(std::size_t j, std::size_t n)
{
    return j < (n + 1) / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

} // namespace mwell
