#include "core/types.hpp"

#include <cmath>
#include <numbers>

namespace evs {

double principal_phase(double a) {
    constexpr double pi = std::numbers::pi;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -pi) a += two_pi;
    if (a > pi) a -= two_pi;
    // fmod of values just above pi can land exactly on -pi via the first branch
    if (a == -pi) a = pi;
    return a;
}

double safe_phase(const cx& z, double floor) {
    if (std::abs(z) <= floor) return 0.0;
    double a = std::arg(z);
    if (a == -std::numbers::pi) a = std::numbers::pi;
    return a;
}

}  // namespace evs
