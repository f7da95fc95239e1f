/// @file types.hpp
/// @brief Basic scalar/index types and the error hierarchy used across the library.

#ifndef FETISTOKES_CORE_TYPES_HPP
#define FETISTOKES_CORE_TYPES_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace fetistokes {

using index_t = int;
using Vector = std::vector<double>;

/// Invalid run or mesh configuration (bad dimension, ratio, primal spec, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operand sizes do not match the operator.
class DimensionMismatch : public std::runtime_error {
public:
    explicit DimensionMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

/// Factorization hit an exactly singular pivot. `pivot` is the offending
/// row/column when the backend can identify it, -1 otherwise.
class SingularMatrix : public std::runtime_error {
public:
    SingularMatrix(const std::string& msg, index_t pivot_index)
        : std::runtime_error(msg), pivot(pivot_index) {}
    index_t pivot = -1;
};

/// Cholesky-type factorization found a non-positive pivot.
class NotPositiveDefinite : public std::runtime_error {
public:
    NotPositiveDefinite(const std::string& msg, index_t pivot_index)
        : std::runtime_error(msg), pivot(pivot_index) {}
    index_t pivot = -1;
};

/// Conjugate gradients met a non-positive curvature or preconditioner value,
/// which signals an inconsistent right-hand side or a non-symmetric operator.
class BreakdownError : public std::runtime_error {
public:
    explicit BreakdownError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace fetistokes

#endif // FETISTOKES_CORE_TYPES_HPP
