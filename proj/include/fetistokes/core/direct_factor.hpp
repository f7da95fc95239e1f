/// @file direct_factor.hpp
/// @brief Direct factorizations (sparse SPD Cholesky, sparse symmetric
///        indefinite via pivoted LU, dense Cholesky) behind one immutable
///        handle. A DirectFactor is safe for concurrent solves.

#ifndef FETISTOKES_CORE_DIRECT_FACTOR_HPP
#define FETISTOKES_CORE_DIRECT_FACTOR_HPP

#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "sparse_matrix.hpp"
#include "types.hpp"

namespace fetistokes {

enum class FactorKind { SpdCholesky, SymmetricIndefinite, DenseCholesky };

inline Eigen::SparseMatrix<double> to_eigen(const SparseMat& a) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(a.nnz());
    for (index_t i = 0; i < a.rows; ++i)
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            trip.emplace_back(i, a.col_idx[k], a.values[k]);
    Eigen::SparseMatrix<double> m(a.rows, a.cols);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

namespace detail {

struct FactorImpl {
    FactorKind kind;
    index_t n = 0;
    // exactly one of these is populated, per kind
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    Eigen::LLT<Eigen::MatrixXd> llt;
};

} // namespace detail

class DirectFactor {
public:
    DirectFactor() = default;

    FactorKind kind() const { return impl_->kind; }
    index_t size() const { return impl_->n; }

    void solve(const Vector& b, Vector& x) const {
        const auto& im = *impl_;
        if (static_cast<index_t>(b.size()) != im.n)
            throw DimensionMismatch("DirectFactor::solve: size(b) != n");
        Eigen::Map<const Eigen::VectorXd> bb(b.data(), im.n);
        x.resize(im.n);
        Eigen::Map<Eigen::VectorXd> xx(x.data(), im.n);
        switch (im.kind) {
            case FactorKind::SpdCholesky: xx = im.ldlt.solve(bb); break;
            case FactorKind::SymmetricIndefinite: xx = im.lu.solve(bb); break;
            case FactorKind::DenseCholesky: xx = im.llt.solve(bb); break;
        }
    }

    Vector solve(const Vector& b) const {
        Vector x;
        solve(b, x);
        return x;
    }

    /// Multi-column solve, used to build Schur complement columns.
    Eigen::MatrixXd solve_dense(const Eigen::MatrixXd& b) const {
        const auto& im = *impl_;
        switch (im.kind) {
            case FactorKind::SpdCholesky: return im.ldlt.solve(b);
            case FactorKind::SymmetricIndefinite: return im.lu.solve(b);
            case FactorKind::DenseCholesky: return im.llt.solve(b);
        }
        return {};
    }

    static DirectFactor make(std::shared_ptr<const detail::FactorImpl> impl) {
        DirectFactor f;
        f.impl_ = std::move(impl);
        return f;
    }

private:
    std::shared_ptr<const detail::FactorImpl> impl_;
};

/// Sparse Cholesky (LDL^T, fill-reducing ordering) of a symmetric positive
/// definite matrix. Only the lower triangle of `a` is read.
inline DirectFactor factor_spd(const SparseMat& a) {
    if (a.rows != a.cols) throw DimensionMismatch("factor_spd: matrix not square");
    auto impl = std::make_shared<detail::FactorImpl>();
    impl->kind = FactorKind::SpdCholesky;
    impl->n = a.rows;
    impl->ldlt.compute(to_eigen(a));
    if (impl->ldlt.info() != Eigen::Success)
        throw NotPositiveDefinite("factor_spd: factorization failed", -1);
    const auto& d = impl->ldlt.vectorD();
    for (index_t i = 0; i < impl->n; ++i)
        if (!(d[i] > 0.0)) {
            index_t orig = impl->ldlt.permutationPinv().indices()[i];
            throw NotPositiveDefinite("factor_spd: non-positive pivot", orig);
        }
    return DirectFactor::make(std::move(impl));
}

/// Pivoted sparse LU of a structurally symmetric, indefinite matrix
/// (saddle-point subdomain blocks).
inline DirectFactor factor_sym_indef(const SparseMat& a) {
    if (a.rows != a.cols) throw DimensionMismatch("factor_sym_indef: matrix not square");
    auto impl = std::make_shared<detail::FactorImpl>();
    impl->kind = FactorKind::SymmetricIndefinite;
    impl->n = a.rows;
    Eigen::SparseMatrix<double> m = to_eigen(a);
    impl->lu.isSymmetric(true);
    impl->lu.analyzePattern(m);
    impl->lu.factorize(m);
    if (impl->lu.info() != Eigen::Success) {
        // the backend reports a zero pivot column in its message; recover the
        // index when present
        index_t pivot = -1;
        const std::string msg = impl->lu.lastErrorMessage();
        auto pos = msg.find_last_not_of("0123456789");
        if (pos != std::string::npos && pos + 1 < msg.size())
            pivot = static_cast<index_t>(std::stol(msg.substr(pos + 1)));
        throw SingularMatrix("factor_sym_indef: " + msg, pivot);
    }
    return DirectFactor::make(std::move(impl));
}

/// Dense Cholesky of a symmetric positive definite matrix.
inline DirectFactor dense_factor_spd(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("dense_factor_spd: matrix not square");
    auto impl = std::make_shared<detail::FactorImpl>();
    impl->kind = FactorKind::DenseCholesky;
    impl->n = static_cast<index_t>(a.rows());
    impl->llt.compute(a);
    if (impl->llt.info() != Eigen::Success)
        throw NotPositiveDefinite("dense_factor_spd: non-positive pivot", -1);
    return DirectFactor::make(std::move(impl));
}

} // namespace fetistokes

#endif // FETISTOKES_CORE_DIRECT_FACTOR_HPP
