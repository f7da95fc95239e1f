/// @file matrix_market.hpp
/// @brief Matrix Market coordinate import/export for SparseMat.

#ifndef FETISTOKES_CORE_MATRIX_MARKET_HPP
#define FETISTOKES_CORE_MATRIX_MARKET_HPP

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "sparse_matrix.hpp"

namespace fetistokes {

inline void write_matrix_market(const SparseMat& a, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows << " " << a.cols << " " << a.nnz() << "\n";
    char buf[64];
    for (index_t i = 0; i < a.rows; ++i)
        for (index_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", a.values[k]);
            out << (i + 1) << " " << (a.col_idx[k] + 1) << " " << buf << "\n";
        }
}

inline SparseMat read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix coordinate real", 0) != 0)
        throw ConfigError("matrix market: unsupported or missing header");
    while (in.peek() == '%') std::getline(in, line);
    index_t rows, cols;
    long long nnz;
    in >> rows >> cols >> nnz;
    TripletBuilder b(rows, cols);
    for (long long k = 0; k < nnz; ++k) {
        index_t i, j;
        double v;
        if (!(in >> i >> j >> v)) throw ConfigError("matrix market: truncated entry list");
        b.add(i - 1, j - 1, v);
    }
    return b.build();
}

} // namespace fetistokes

#endif // FETISTOKES_CORE_MATRIX_MARKET_HPP
