#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace evs {

using cx = std::complex<double>;

constexpr double kSpeedOfLight = 299792458.0;

/// Dense complex matrix, row-major. Rows index subcarriers, columns index
/// OFDM symbols throughout the library.
struct CMat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cx> v;

    CMat() = default;
    CMat(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c) {}

    cx& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    const cx& at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }

    bool same_shape(const CMat& o) const { return rows == o.rows && cols == o.cols; }
};

/// Wrap an angle to (-pi, pi].
double principal_phase(double a);

/// Phase of z in (-pi, pi], with the convention that the phase of a
/// numerically vanished value (|z| <= floor) is 0 rather than the angle of
/// rounding noise.
double safe_phase(const cx& z, double floor = 1e-12);

}  // namespace evs
