#pragma once
#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <vector>

namespace btw {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct IntMatrix {
    int rows = 0, cols = 0;
    std::vector<Int> a;

    IntMatrix() = default;
    IntMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}
    static IntMatrix identity(int n);

    Int& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const Int& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    IntMatrix operator*(const IntMatrix& o) const;
    std::vector<Int> apply(const std::vector<Int>& x) const;
    bool operator==(const IntMatrix&) const = default;
};

// P * A * Q = D with P, Q unimodular; D diagonal with d_0 | d_1 | ... (positive).
struct SmithForm {
    std::vector<Int> diag;  // nonzero invariant factors, length == rank
    IntMatrix P, Pinv, Q, Qinv;
    int rank() const { return static_cast<int>(diag.size()); }
};

SmithForm smith(const IntMatrix& A);

int rank_mod2(const IntMatrix& A);

// Some x with A x = b over Z, or nothing.
std::optional<std::vector<Int>> solve_integer(const SmithForm& S, const IntMatrix& A, const std::vector<Int>& b);
// Basis of the integer kernel of A (saturated).
std::vector<std::vector<Int>> kernel_basis(const SmithForm& S, const IntMatrix& A);

// Mod-2 linear algebra on bit rows.
// Returns a solution of A x = b over Z/2 if one exists.
std::optional<std::vector<int>> solve_mod2(const IntMatrix& A, const std::vector<int>& b);

// Exact rational linear algebra.
struct RatMatrix {
    int rows = 0, cols = 0;
    std::vector<Rat> a;
    RatMatrix() = default;
    RatMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}
    Rat& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const Rat& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

// Basis of the null space over Q.
std::vector<std::vector<Rat>> nullspace(const RatMatrix& A);
int rank(const RatMatrix& A);

// Feasibility of { x : A x = b, x >= lower } by exact two-phase simplex (Bland's rule).
std::optional<std::vector<Rat>> feasible_point(const RatMatrix& A, const std::vector<Rat>& b,
                                               const std::vector<Rat>& lower);

}  // namespace btw
