/// @file manufactured.hpp
/// @brief Manufactured Stokes solutions with zero boundary velocity and
///        divergence-free velocity; body forces are the closed forms of
///        -lap(u) + grad(p), derived symbolically offline.

#ifndef FETISTOKES_FEM_MANUFACTURED_HPP
#define FETISTOKES_FEM_MANUFACTURED_HPP

#include <array>
#include <cmath>

#include "../core/types.hpp"

namespace fetistokes {

struct ManufacturedCase {
    int dim = 2;
    std::array<double, 3> (*velocity)(const std::array<double, 3>&) = nullptr;
    double (*pressure)(const std::array<double, 3>&) = nullptr;
    std::array<double, 3> (*body_force)(const std::array<double, 3>&) = nullptr;
};

namespace detail {

constexpr double kPi = 3.14159265358979323846;

inline std::array<double, 3> vel2d(const std::array<double, 3>& x) {
    double s = std::sin(kPi * x[0]), c = std::cos(kPi * x[0]);
    double t = std::sin(kPi * x[1]), d = std::cos(kPi * x[1]);
    return {s * s * s * t * t * d, -s * s * t * t * t * c, 0.0};
}

inline double pres2d(const std::array<double, 3>& x) { return x[0] * x[0] - x[1] * x[1]; }

inline std::array<double, 3> force2d(const std::array<double, 3>& x) {
    double s = std::sin(kPi * x[0]), c = std::cos(kPi * x[0]);
    double t = std::sin(kPi * x[1]), d = std::cos(kPi * x[1]);
    double pi2 = kPi * kPi;
    double f1 = -pi2 * (6.0 * s * c * c * t * t * d + 2.0 * s * s * s * d * d * d -
                        10.0 * s * s * s * t * t * d) +
                2.0 * x[0];
    double f2 = pi2 * (2.0 * c * c * c * t * t * t - 10.0 * s * s * c * t * t * t +
                       6.0 * s * s * c * t * d * d) -
                2.0 * x[1];
    return {f1, f2, 0.0};
}

inline std::array<double, 3> vel3d(const std::array<double, 3>& x) {
    double sx = std::sin(kPi * x[0]), sy = std::sin(kPi * x[1]), sz = std::sin(kPi * x[2]);
    double s2x = std::sin(2.0 * kPi * x[0]), s2y = std::sin(2.0 * kPi * x[1]),
           s2z = std::sin(2.0 * kPi * x[2]);
    return {sx * sx * (s2y * sz - sy * s2z), sy * sy * (s2z * sx - sz * s2x),
            sz * sz * (s2x * sy - sx * s2y)};
}

inline double pres3d(const std::array<double, 3>& x) { return x[0] * x[1] * x[2] - 0.125; }

inline std::array<double, 3> force3d(const std::array<double, 3>& x) {
    double sx = std::sin(kPi * x[0]), sy = std::sin(kPi * x[1]), sz = std::sin(kPi * x[2]);
    double s2x = std::sin(2.0 * kPi * x[0]), s2y = std::sin(2.0 * kPi * x[1]),
           s2z = std::sin(2.0 * kPi * x[2]);
    double c2x = std::cos(2.0 * kPi * x[0]), c2y = std::cos(2.0 * kPi * x[1]),
           c2z = std::cos(2.0 * kPi * x[2]);
    double pi2 = kPi * kPi;
    return {-pi2 * (2.0 * c2x - 5.0 * sx * sx) * (s2y * sz - sy * s2z) + x[1] * x[2],
            -pi2 * (2.0 * c2y - 5.0 * sy * sy) * (s2z * sx - sz * s2x) + x[0] * x[2],
            -pi2 * (2.0 * c2z - 5.0 * sz * sz) * (s2x * sy - sx * s2y) + x[0] * x[1]};
}

} // namespace detail

inline ManufacturedCase manufactured_case(int dim) {
    if (dim == 2) return {2, detail::vel2d, detail::pres2d, detail::force2d};
    if (dim == 3) return {3, detail::vel3d, detail::pres3d, detail::force3d};
    throw ConfigError("manufactured_case: dim must be 2 or 3");
}

struct ExactValue {
    std::array<double, 3> u;
    double p;
};

inline ExactValue exact_eval(const ManufacturedCase& mc, const std::array<double, 3>& x) {
    return {mc.velocity(x), mc.pressure(x)};
}

} // namespace fetistokes

#endif // FETISTOKES_FEM_MANUFACTURED_HPP
