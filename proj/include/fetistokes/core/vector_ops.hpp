/// @file vector_ops.hpp
/// @brief Small dense-vector helpers (dot, norm, axpy) on std::vector<double>.

#ifndef FETISTOKES_CORE_VECTOR_OPS_HPP
#define FETISTOKES_CORE_VECTOR_OPS_HPP

#include <cmath>
#include <cstddef>

#include "types.hpp"

namespace fetistokes {

inline double dot(const Vector& x, const Vector& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const Vector& x) { return std::sqrt(dot(x, x)); }

/// y += a*x
inline void axpy(double a, const Vector& x, Vector& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale(double a, Vector& x) {
    for (double& v : x) v *= a;
}

inline void set_zero(Vector& x) {
    for (double& v : x) v = 0.0;
}

} // namespace fetistokes

#endif // FETISTOKES_CORE_VECTOR_OPS_HPP
