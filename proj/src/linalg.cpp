#include "cm/linalg.hpp"

#include <stdexcept>

namespace cm {

Echelon row_reduce(QMatrix m) {
    Echelon e;
    if (m.empty()) return e;
    std::size_t rows = m.size(), cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[r], m[piv]);
        mpq_class inv = 1 / m[r][c];
        for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            mpq_class f = m[i][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        e.pivots.push_back(c);
        ++r;
    }
    m.resize(r);
    e.rref = std::move(m);
    return e;
}

std::size_t rank(const QMatrix& m) { return row_reduce(m).rank(); }

std::size_t rank(const ZMatrix& m0) {
    // Fraction-free Bareiss elimination with row pivoting.
    ZMatrix m = m0;
    if (m.empty()) return 0;
    std::size_t rows = m.size(), cols = m[0].size();
    mpz_class prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[r], m[piv]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                m[i][j] = m[r][c] * m[i][j] - m[i][c] * m[r][j];
                mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
            }
            m[i][c] = 0;
        }
        prev = m[r][c];
        ++r;
    }
    return r;
}

std::size_t rank_mod_p(std::vector<std::vector<u64>> m, u64 p) {
    if (m.empty()) return 0;
    std::size_t rows = m.size(), cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] % p == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[r], m[piv]);
        u64 inv = powmod(m[r][c] % p, p - 2, p);
        for (std::size_t j = c; j < cols; ++j) m[r][j] = mulmod(m[r][j] % p, inv, p);
        for (std::size_t i = r + 1; i < rows; ++i) {
            u64 f = m[i][c] % p;
            if (!f) continue;
            for (std::size_t j = c; j < cols; ++j) m[i][j] = (m[i][j] % p + p - mulmod(f, m[r][j], p)) % p;
        }
        ++r;
    }
    return r;
}

QMatrix nullspace(const QMatrix& m, std::size_t ncols) {
    Echelon e = row_reduce(m);
    std::vector<int> pivot_row(ncols, -1);
    for (std::size_t i = 0; i < e.pivots.size(); ++i) pivot_row[e.pivots[i]] = (int)i;
    QMatrix basis;
    for (std::size_t free = 0; free < ncols; ++free) {
        if (pivot_row[free] >= 0) continue;
        QVector v(ncols, 0);
        v[free] = 1;
        for (std::size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.rref[i][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<std::size_t> leftmost_independent_rows(const QMatrix& rows) {
    std::vector<std::size_t> keep;
    QMatrix echelon;  // kept rows, reduced
    std::vector<std::size_t> piv;
    for (std::size_t idx = 0; idx < rows.size(); ++idx) {
        QVector v = rows[idx];
        for (std::size_t i = 0; i < echelon.size(); ++i) {
            if (v[piv[i]] == 0) continue;
            mpq_class f = v[piv[i]];
            for (std::size_t j = 0; j < v.size(); ++j) v[j] -= f * echelon[i][j];
        }
        std::size_t c = 0;
        while (c < v.size() && v[c] == 0) ++c;
        if (c == v.size()) continue;
        mpq_class inv = 1 / v[c];
        for (auto& x : v) x *= inv;
        for (std::size_t i = 0; i < echelon.size(); ++i) {
            if (echelon[i][c] == 0) continue;
            mpq_class f = echelon[i][c];
            for (std::size_t j = 0; j < v.size(); ++j) echelon[i][j] -= f * v[j];
        }
        echelon.push_back(std::move(v));
        piv.push_back(c);
        keep.push_back(idx);
    }
    return keep;
}

std::optional<std::vector<mpq_class>> coordinates_in_span(const QMatrix& basis, const QVector& v) {
    // Solve sum_i c_i basis[i] = v as a linear system on the transposed basis.
    std::size_t k = basis.size(), len = v.size();
    QMatrix aug(len, QVector(k + 1, 0));
    for (std::size_t j = 0; j < len; ++j) {
        for (std::size_t i = 0; i < k; ++i) aug[j][i] = basis[i][j];
        aug[j][k] = v[j];
    }
    Echelon e = row_reduce(aug);
    std::vector<mpq_class> c(k, 0);
    for (std::size_t i = 0; i < e.pivots.size(); ++i) {
        if (e.pivots[i] == k) return std::nullopt;
        c[e.pivots[i]] = e.rref[i][k];
    }
    return c;
}

QMatrix to_rational(const ZMatrix& m) {
    QMatrix q(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (const auto& x : m[i]) q[i].emplace_back(x);
    return q;
}

std::vector<mpz_class> primitive_integer(const QVector& v) {
    mpz_class l = 1;
    for (const auto& x : v) l = lcm(l, x.get_den());
    std::vector<mpz_class> out;
    mpz_class g = 0;
    for (const auto& x : v) {
        mpq_class y = x * l;
        out.push_back(y.get_num());
        g = gcd(g, out.back());
    }
    if (g == 0) return out;
    int sign = 1;
    for (const auto& x : out)
        if (x != 0) { sign = x < 0 ? -1 : 1; break; }
    for (auto& x : out) x = x / g * sign;
    return out;
}

}  // namespace cm
