#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "cm/ntheory.hpp"

namespace cm {

using QVector = std::vector<mpq_class>;
using QMatrix = std::vector<QVector>;
using ZMatrix = std::vector<std::vector<mpz_class>>;

struct Echelon {
    QMatrix rref;                     // reduced row echelon form, zero rows dropped
    std::vector<std::size_t> pivots;  // pivot column of each rref row
    std::size_t rank() const { return pivots.size(); }
};

Echelon row_reduce(QMatrix m);
std::size_t rank(const QMatrix& m);
std::size_t rank(const ZMatrix& m);
std::size_t rank_mod_p(std::vector<std::vector<u64>> m, u64 p);

// Basis of {v : m v = 0}.
QMatrix nullspace(const QMatrix& m, std::size_t ncols);

// Greedy scan in row order: indices of rows that are independent of the rows kept before them.
std::vector<std::size_t> leftmost_independent_rows(const QMatrix& rows);

// Coordinates c with sum_i c_i basis[i] = v; nullopt when v is outside the span.
std::optional<std::vector<mpq_class>> coordinates_in_span(const QMatrix& basis, const QVector& v);

QMatrix to_rational(const ZMatrix& m);
// Scale a rational vector to a primitive integer vector with first nonzero entry positive.
std::vector<mpz_class> primitive_integer(const QVector& v);

}  // namespace cm
