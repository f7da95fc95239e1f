/// @file sparse_matrix.hpp
/// @brief CSR sparse matrix with owned storage, a triplet builder, and
///        matrix-vector products.

#ifndef FETISTOKES_CORE_SPARSE_MATRIX_HPP
#define FETISTOKES_CORE_SPARSE_MATRIX_HPP

#include <algorithm>
#include <numeric>
#include <tuple>
#include <vector>

#include "types.hpp"

namespace fetistokes {

/// Sparse matrix in compressed-row storage. Column indices are strictly
/// increasing within each row; duplicates are combined by the builder.
struct SparseMat {
    index_t rows = 0;
    index_t cols = 0;
    std::vector<index_t> row_ptr;  // size rows+1
    std::vector<index_t> col_idx;
    std::vector<double> values;

    index_t nnz() const { return static_cast<index_t>(values.size()); }

    double coeff(index_t i, index_t j) const {
        for (index_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            if (col_idx[k] == j) return values[k];
        return 0.0;
    }

    static SparseMat identity(index_t n) {
        SparseMat a;
        a.rows = a.cols = n;
        a.row_ptr.resize(n + 1);
        a.col_idx.resize(n);
        a.values.assign(n, 1.0);
        for (index_t i = 0; i < n; ++i) {
            a.row_ptr[i] = i;
            a.col_idx[i] = i;
        }
        a.row_ptr[n] = n;
        return a;
    }
};

/// Accumulates (i, j, v) entries and compresses them into CSR.
class TripletBuilder {
public:
    TripletBuilder(index_t rows, index_t cols) : rows_(rows), cols_(cols) {}

    void add(index_t i, index_t j, double v) {
        if (v == 0.0) return;
        entries_.emplace_back(i, j, v);
    }

    SparseMat build() {
        SparseMat a;
        a.rows = rows_;
        a.cols = cols_;
        auto& ents = entries_;
        std::sort(ents.begin(), ents.end(), [](const auto& x, const auto& y) {
            return std::tie(std::get<0>(x), std::get<1>(x)) <
                   std::tie(std::get<0>(y), std::get<1>(y));
        });
        a.row_ptr.assign(rows_ + 1, 0);
        for (std::size_t k = 0; k < ents.size();) {
            std::size_t k2 = k;
            double s = 0.0;
            while (k2 < ents.size() && std::get<0>(ents[k2]) == std::get<0>(ents[k]) &&
                   std::get<1>(ents[k2]) == std::get<1>(ents[k])) {
                s += std::get<2>(ents[k2]);
                ++k2;
            }
            a.col_idx.push_back(std::get<1>(ents[k]));
            a.values.push_back(s);
            ++a.row_ptr[std::get<0>(ents[k]) + 1];
            k = k2;
        }
        for (index_t i = 0; i < rows_; ++i) a.row_ptr[i + 1] += a.row_ptr[i];
        entries_.clear();
        entries_.shrink_to_fit();
        return a;
    }

private:
    index_t rows_, cols_;
    std::vector<std::tuple<index_t, index_t, double>> entries_;
};

/// y = A*x
inline void spmv(const SparseMat& a, const Vector& x, Vector& y) {
    if (static_cast<index_t>(x.size()) != a.cols)
        throw DimensionMismatch("spmv: size(x) != cols");
    y.assign(a.rows, 0.0);
    for (index_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            s += a.values[k] * x[a.col_idx[k]];
        y[i] = s;
    }
}

inline Vector spmv(const SparseMat& a, const Vector& x) {
    Vector y;
    spmv(a, x, y);
    return y;
}

/// y = A^T*x
inline void spmv_transpose(const SparseMat& a, const Vector& x, Vector& y) {
    if (static_cast<index_t>(x.size()) != a.rows)
        throw DimensionMismatch("spmv_transpose: size(x) != rows");
    y.assign(a.cols, 0.0);
    for (index_t i = 0; i < a.rows; ++i)
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            y[a.col_idx[k]] += a.values[k] * x[i];
}

inline Vector spmv_transpose(const SparseMat& a, const Vector& x) {
    Vector y;
    spmv_transpose(a, x, y);
    return y;
}

/// y += A*x (no resize)
inline void spmv_add(const SparseMat& a, const Vector& x, Vector& y) {
    for (index_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            s += a.values[k] * x[a.col_idx[k]];
        y[i] += s;
    }
}

/// y += A^T*x (no resize)
inline void spmv_transpose_add(const SparseMat& a, const Vector& x, Vector& y) {
    for (index_t i = 0; i < a.rows; ++i)
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            y[a.col_idx[k]] += a.values[k] * x[i];
}

/// (A + A^T)/2
inline SparseMat symmetrize(const SparseMat& a) {
    TripletBuilder b(a.rows, a.cols);
    for (index_t i = 0; i < a.rows; ++i)
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            b.add(i, a.col_idx[k], 0.5 * a.values[k]);
            b.add(a.col_idx[k], i, 0.5 * a.values[k]);
        }
    return b.build();
}

inline SparseMat transpose(const SparseMat& a) {
    TripletBuilder b(a.cols, a.rows);
    for (index_t i = 0; i < a.rows; ++i)
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            b.add(a.col_idx[k], i, a.values[k]);
    return b.build();
}

/// C = A*B
inline SparseMat mat_mult(const SparseMat& a, const SparseMat& b) {
    if (a.cols != b.rows) throw DimensionMismatch("mat_mult: inner dimensions differ");
    TripletBuilder t(a.rows, b.cols);
    for (index_t i = 0; i < a.rows; ++i)
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            index_t j = a.col_idx[k];
            double v = a.values[k];
            for (index_t k2 = b.row_ptr[j]; k2 < b.row_ptr[j + 1]; ++k2)
                t.add(i, b.col_idx[k2], v * b.values[k2]);
        }
    return t.build();
}

/// Extract A(rows, cols) given position maps: row_pos[i] >= 0 selects row i as
/// output row row_pos[i], likewise for columns.
inline SparseMat extract_block(const SparseMat& a, const std::vector<index_t>& row_pos,
                               index_t out_rows, const std::vector<index_t>& col_pos,
                               index_t out_cols) {
    TripletBuilder b(out_rows, out_cols);
    for (index_t i = 0; i < a.rows; ++i) {
        if (row_pos[i] < 0) continue;
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            index_t jc = col_pos[a.col_idx[k]];
            if (jc >= 0) b.add(row_pos[i], jc, a.values[k]);
        }
    }
    return b.build();
}

} // namespace fetistokes

#endif // FETISTOKES_CORE_SPARSE_MATRIX_HPP
