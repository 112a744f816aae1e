#include "sei/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace sei::fft {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

void dft2(std::vector<Complex>& data, std::size_t rows, std::size_t cols, bool inverse) {
    if (data.empty()) return;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), buf, buf,
                                inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(rows * cols);
        for (auto& c : data) c *= inv;
    }
}

std::vector<Complex> dft2_real(const std::vector<double>& data, std::size_t rows,
                               std::size_t cols) {
    std::vector<Complex> out(data.begin(), data.end());
    dft2(out, rows, cols, false);
    return out;
}

}  // namespace sei::fft
