/// Shared helpers for the test suites: a seeded generator, random vectors,
/// and dense views of library objects for oracle comparisons.

#ifndef FETISTOKES_TESTS_TEST_HELPERS_HPP
#define FETISTOKES_TESTS_TEST_HELPERS_HPP

#include <random>
#include <vector>

#include <Eigen/Dense>

#include <fetistokes/core/sparse_matrix.hpp>

namespace testutil {

using fetistokes::index_t;
using fetistokes::SparseMat;
using fetistokes::Vector;

inline std::mt19937& rng() {
    static std::mt19937 gen(20240811u);
    return gen;
}

inline Vector random_vector(std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Vector v(n);
    for (double& x : v) x = dist(rng());
    return v;
}

inline Eigen::MatrixXd to_dense(const SparseMat& a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.rows, a.cols);
    for (index_t i = 0; i < a.rows; ++i)
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            m(i, a.col_idx[k]) = a.values[k];
    return m;
}

inline SparseMat random_sparse(index_t rows, index_t cols, double density = 0.4) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    fetistokes::TripletBuilder b(rows, cols);
    for (index_t i = 0; i < rows; ++i)
        for (index_t j = 0; j < cols; ++j)
            if (coin(rng()) < density) b.add(i, j, val(rng()));
    return b.build();
}

/// Random SPD matrix D + R R^T with dominant diagonal.
inline SparseMat random_spd(index_t n) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Random(n, n);
    Eigen::MatrixXd m = r * r.transpose() + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
    fetistokes::TripletBuilder b(n, n);
    for (index_t i = 0; i < n; ++i)
        for (index_t j = 0; j < n; ++j) b.add(i, j, m(i, j));
    return b.build();
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace testutil

#endif
