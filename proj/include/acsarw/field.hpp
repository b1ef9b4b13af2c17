#pragma once

// Exact arithmetic over a prime field F_q, plus the dense linear algebra the
// protocol needs (Gaussian elimination, matrix inverse, column-space tests).
// q is desk-scale (<= 2^31), so a 64-bit product of two canonical
// representatives never overflows and no wide-integer tricks are needed.

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

#include "acsarw/errors.hpp"

namespace acsarw {

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

inline std::uint64_t next_prime_at_least(std::uint64_t n) {
    if (n < 2) return 2;
    while (!is_prime(n)) ++n;
    return n;
}

// One element of F_q. Every element carries its modulus so that arithmetic
// between different fields (or with a default-constructed element) is caught
// at run time instead of silently producing garbage.
struct Fe {
    std::uint32_t v = 0; // canonical representative in [0, q)
    std::uint32_t q = 0; // 0 = unattached; any arithmetic on it throws

    friend void require_same_field(Fe a, Fe b) {
        if (a.q == 0 || a.q != b.q)
            throw UsageError("field elements from different or unset moduli: q=" +
                             std::to_string(a.q) + " vs q=" + std::to_string(b.q));
    }

    friend Fe operator+(Fe a, Fe b) {
        require_same_field(a, b);
        std::uint32_t s = a.v + b.v; // v < q <= 2^31, no uint32 overflow
        if (s >= a.q) s -= a.q;
        return Fe{s, a.q};
    }
    friend Fe operator-(Fe a, Fe b) {
        require_same_field(a, b);
        return Fe{a.v >= b.v ? a.v - b.v : a.v + a.q - b.v, a.q};
    }
    friend Fe operator*(Fe a, Fe b) {
        require_same_field(a, b);
        return Fe{static_cast<std::uint32_t>(std::uint64_t(a.v) * b.v % a.q), a.q};
    }
    Fe operator-() const {
        if (q == 0) throw UsageError("negating an unset field element");
        return Fe{v == 0 ? 0 : q - v, q};
    }
    Fe& operator+=(Fe o) { return *this = *this + o; }
    Fe& operator-=(Fe o) { return *this = *this - o; }
    Fe& operator*=(Fe o) { return *this = *this * o; }

    friend bool operator==(Fe a, Fe b) { return a.v == b.v && a.q == b.q; }
    friend bool operator!=(Fe a, Fe b) { return !(a == b); }

    bool is_zero() const { return v == 0; }
};

// Multiplicative inverse by the extended Euclidean algorithm.
inline Fe inv(Fe a) {
    if (a.q == 0) throw UsageError("inverse of an unset field element");
    if (a.v == 0) throw SingularError("division by zero in F_" + std::to_string(a.q));
    std::int64_t r0 = a.q, r1 = a.v, s0 = 0, s1 = 1;
    while (r1 != 0) {
        std::int64_t k = r0 / r1;
        r0 -= k * r1;
        s0 -= k * s1;
        std::swap(r0, r1);
        std::swap(s0, s1);
    }
    // r0 = gcd(q, v) = 1 since q is prime and 0 < v < q
    if (s0 < 0) s0 += a.q;
    return Fe{static_cast<std::uint32_t>(s0), a.q};
}

inline Fe pow(Fe base, std::uint64_t e) {
    if (base.q == 0) throw UsageError("power of an unset field element");
    Fe acc{1 % base.q, base.q};
    while (e) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

// The field itself: validates the modulus once and mints elements.
class Field {
public:
    explicit Field(std::uint64_t q) : q_(static_cast<std::uint32_t>(q)) {
        if (q < 2) throw ConfigError("field modulus must be >= 2, got " + std::to_string(q));
        if (q > (std::uint64_t(1) << 31))
            throw ConfigError("field modulus exceeds 2^31: " + std::to_string(q));
        if (!is_prime(q)) throw ConfigError("field modulus must be prime, got " + std::to_string(q));
    }

    std::uint32_t modulus() const { return q_; }

    Fe make(std::uint64_t x) const { return Fe{static_cast<std::uint32_t>(x % q_), q_}; }
    Fe from_signed(std::int64_t x) const {
        std::int64_t r = x % static_cast<std::int64_t>(q_);
        if (r < 0) r += q_;
        return Fe{static_cast<std::uint32_t>(r), q_};
    }
    Fe zero() const { return Fe{0, q_}; }
    Fe one() const { return Fe{1, q_}; }

    std::vector<Fe> zeros(std::size_t n) const { return std::vector<Fe>(n, zero()); }

    friend bool operator==(const Field& a, const Field& b) { return a.q_ == b.q_; }

private:
    std::uint32_t q_;
};

// Dense row-major matrix over F_q. Small systems only (the protocol never
// solves anything larger than N x N).
class Mat {
public:
    Mat(std::size_t rows, std::size_t cols, Fe fill)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Fe& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    Fe operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

private:
    std::size_t rows_, cols_;
    std::vector<Fe> a_;
};

// Solve A x = b by Gaussian elimination with first-nonzero pivoting (exact
// arithmetic makes pivot magnitude irrelevant). Throws SingularError if A is
// singular.
inline std::vector<Fe> solve_linear(Mat A, std::vector<Fe> b) {
    const std::size_t n = A.rows();
    if (A.cols() != n) throw UsageError("solve_linear: matrix is not square");
    if (b.size() != n) throw UsageError("solve_linear: rhs length does not match");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && A(piv, col).is_zero()) ++piv;
        if (piv == n) throw SingularError("solve_linear: singular matrix");
        if (piv != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(A(piv, c), A(col, c));
            std::swap(b[piv], b[col]);
        }
        Fe ip = inv(A(col, col));
        for (std::size_t c = col; c < n; ++c) A(col, c) *= ip;
        b[col] *= ip;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A(r, col).is_zero()) continue;
            Fe factor = A(r, col);
            for (std::size_t c = col; c < n; ++c) A(r, c) -= factor * A(col, c);
            b[r] -= factor * b[col];
        }
    }
    return b;
}

// Full inverse via Gauss-Jordan on [A | I]. Used to cache decode matrices
// that are applied to many right-hand sides.
inline Mat invert(Mat A) {
    const std::size_t n = A.rows();
    if (A.cols() != n) throw UsageError("invert: matrix is not square");
    if (n == 0) return A;
    const std::uint32_t q = A(0, 0).q;
    Mat I(n, n, Fe{0, q});
    for (std::size_t i = 0; i < n; ++i) I(i, i) = Fe{1 % q, q};
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && A(piv, col).is_zero()) ++piv;
        if (piv == n) throw SingularError("invert: singular matrix");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(A(piv, c), A(col, c));
                std::swap(I(piv, c), I(col, c));
            }
        }
        Fe ip = inv(A(col, col));
        for (std::size_t c = 0; c < n; ++c) {
            A(col, c) *= ip;
            I(col, c) *= ip;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A(r, col).is_zero()) continue;
            Fe factor = A(r, col);
            for (std::size_t c = 0; c < n; ++c) {
                A(r, c) -= factor * A(col, c);
                I(r, c) -= factor * I(col, c);
            }
        }
    }
    return I;
}

// Incrementally built reduced-echelon basis of a subspace of F_q^dim.
// Supports membership queries; used for storage structural-consistency checks
// (is a cross-server vector inside the Cauchy-Vandermonde column space?).
class SpanBasis {
public:
    SpanBasis(const Field& f, std::size_t dim) : field_(f), dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t rank() const { return basis_.size(); }

    // Reduce v against the basis in place; afterwards v[p] == 0 for every
    // pivot position p. Returns v.
    std::vector<Fe> reduce(std::vector<Fe> v) const {
        if (v.size() != dim_) throw UsageError("SpanBasis: dimension mismatch");
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            Fe c = v[pivot_[i]];
            if (c.is_zero()) continue;
            for (std::size_t p = 0; p < dim_; ++p) v[p] -= c * basis_[i][p];
        }
        return v;
    }

    bool contains(std::vector<Fe> v) const {
        v = reduce(std::move(v));
        for (const Fe& x : v)
            if (!x.is_zero()) return false;
        return true;
    }

    // Add v to the span. Returns true if the rank grew.
    bool add(std::vector<Fe> v) {
        v = reduce(std::move(v));
        std::size_t p = 0;
        while (p < dim_ && v[p].is_zero()) ++p;
        if (p == dim_) return false;
        Fe ip = inv(v[p]);
        for (Fe& x : v) x *= ip;
        // keep reduced form: clear position p in the existing basis vectors
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            Fe c = basis_[i][p];
            if (c.is_zero()) continue;
            for (std::size_t k = 0; k < dim_; ++k) basis_[i][k] -= c * v[k];
        }
        basis_.push_back(std::move(v));
        pivot_.push_back(p);
        return true;
    }

    // Some coordinate that is not a pivot of any basis vector; the standard
    // basis vector there is guaranteed to lie outside the span. Only valid
    // while rank < dim.
    std::size_t free_coordinate() const {
        std::vector<bool> used(dim_, false);
        for (std::size_t p : pivot_) used[p] = true;
        for (std::size_t i = 0; i < dim_; ++i)
            if (!used[i]) return i;
        throw UsageError("SpanBasis: span is full, no free coordinate");
    }

private:
    Field field_;
    std::size_t dim_;
    std::vector<std::vector<Fe>> basis_;
    std::vector<std::size_t> pivot_;
};

} // namespace acsarw
