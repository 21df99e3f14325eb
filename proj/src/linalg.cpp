#include "btw/linalg.hpp"

#include <stdexcept>

namespace btw {

IntMatrix IntMatrix::identity(int n) {
    IntMatrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1;
    return I;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    if (cols != o.rows) throw std::invalid_argument("shape mismatch");
    IntMatrix r(rows, o.cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) {
            const Int& x = (*this)(i, k);
            if (x == 0) continue;
            for (int j = 0; j < o.cols; ++j) r(i, j) += x * o(k, j);
        }
    return r;
}

std::vector<Int> IntMatrix::apply(const std::vector<Int>& x) const {
    if (static_cast<int>(x.size()) != cols) throw std::invalid_argument("shape mismatch");
    std::vector<Int> y(static_cast<std::size_t>(rows));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if ((*this)(i, j) != 0) y[i] += (*this)(i, j) * x[j];
    return y;
}

namespace {

struct SmithWork {
    IntMatrix B, P, Pinv, Q, Qinv;

    void row_swap(int i, int j) {
        if (i == j) return;
        for (int c = 0; c < B.cols; ++c) std::swap(B(i, c), B(j, c));
        for (int c = 0; c < P.cols; ++c) std::swap(P(i, c), P(j, c));
        for (int r = 0; r < Pinv.rows; ++r) std::swap(Pinv(r, i), Pinv(r, j));
    }
    // row_i += m * row_j
    void row_add(int i, int j, const Int& m) {
        if (m == 0) return;
        for (int c = 0; c < B.cols; ++c) B(i, c) += m * B(j, c);
        for (int c = 0; c < P.cols; ++c) P(i, c) += m * P(j, c);
        for (int r = 0; r < Pinv.rows; ++r) Pinv(r, j) -= m * Pinv(r, i);
    }
    void row_neg(int i) {
        for (int c = 0; c < B.cols; ++c) B(i, c) = -B(i, c);
        for (int c = 0; c < P.cols; ++c) P(i, c) = -P(i, c);
        for (int r = 0; r < Pinv.rows; ++r) Pinv(r, i) = -Pinv(r, i);
    }
    void col_swap(int i, int j) {
        if (i == j) return;
        for (int r = 0; r < B.rows; ++r) std::swap(B(r, i), B(r, j));
        for (int r = 0; r < Q.rows; ++r) std::swap(Q(r, i), Q(r, j));
        for (int c = 0; c < Qinv.cols; ++c) std::swap(Qinv(i, c), Qinv(j, c));
    }
    // col_i += m * col_j
    void col_add(int i, int j, const Int& m) {
        if (m == 0) return;
        for (int r = 0; r < B.rows; ++r) B(r, i) += m * B(r, j);
        for (int r = 0; r < Q.rows; ++r) Q(r, i) += m * Q(r, j);
        for (int c = 0; c < Qinv.cols; ++c) Qinv(j, c) -= m * Qinv(i, c);
    }
};

Int abs_int(const Int& x) { return x < 0 ? Int(-x) : x; }

}  // namespace

SmithForm smith(const IntMatrix& A) {
    SmithWork w{A, IntMatrix::identity(A.rows), IntMatrix::identity(A.rows), IntMatrix::identity(A.cols),
                IntMatrix::identity(A.cols)};
    IntMatrix& B = w.B;
    SmithForm S;
    int k = 0;
    while (k < B.rows && k < B.cols) {
        // smallest nonzero entry in the trailing block
        int pi = -1, pj = -1;
        Int best = 0;
        for (int i = k; i < B.rows; ++i)
            for (int j = k; j < B.cols; ++j)
                if (B(i, j) != 0 && (best == 0 || abs_int(B(i, j)) < best)) {
                    best = abs_int(B(i, j));
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break;
        w.row_swap(k, pi);
        w.col_swap(k, pj);
        while (true) {
            bool done = true;
            for (int i = k + 1; i < B.rows; ++i) {
                if (B(i, k) == 0) continue;
                Int q = B(i, k) / B(k, k);
                w.row_add(i, k, -q);
                if (B(i, k) != 0) {
                    w.row_swap(k, i);
                    done = false;
                }
            }
            for (int j = k + 1; j < B.cols; ++j) {
                if (B(k, j) == 0) continue;
                Int q = B(k, j) / B(k, k);
                w.col_add(j, k, -q);
                if (B(k, j) != 0) {
                    w.col_swap(k, j);
                    done = false;
                }
            }
            if (!done) continue;
            int bad = -1;
            for (int i = k + 1; i < B.rows && bad < 0; ++i)
                for (int j = k + 1; j < B.cols; ++j)
                    if (B(i, j) % B(k, k) != 0) {
                        bad = i;
                        break;
                    }
            if (bad < 0) break;
            w.row_add(k, bad, 1);
        }
        if (B(k, k) < 0) w.row_neg(k);
        S.diag.push_back(B(k, k));
        ++k;
    }
    S.P = std::move(w.P);
    S.Pinv = std::move(w.Pinv);
    S.Q = std::move(w.Q);
    S.Qinv = std::move(w.Qinv);
    return S;
}

int rank_mod2(const IntMatrix& A) {
    std::vector<std::vector<int>> M(A.rows, std::vector<int>(A.cols));
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) M[i][j] = static_cast<int>(abs_int(A(i, j)) % 2);
    int r = 0;
    for (int c = 0; c < A.cols && r < A.rows; ++c) {
        int p = -1;
        for (int i = r; i < A.rows; ++i)
            if (M[i][c]) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(M[r], M[p]);
        for (int i = 0; i < A.rows; ++i)
            if (i != r && M[i][c])
                for (int j = c; j < A.cols; ++j) M[i][j] ^= M[r][j];
        ++r;
    }
    return r;
}

std::optional<std::vector<Int>> solve_integer(const SmithForm& S, const IntMatrix& A, const std::vector<Int>& b) {
    std::vector<Int> c = S.P.apply(b);
    std::vector<Int> y(static_cast<std::size_t>(A.cols));
    for (int i = 0; i < A.rows; ++i) {
        if (i < S.rank()) {
            if (c[i] % S.diag[i] != 0) return std::nullopt;
            y[i] = c[i] / S.diag[i];
        } else if (c[i] != 0) {
            return std::nullopt;
        }
    }
    return S.Q.apply(y);
}

std::vector<std::vector<Int>> kernel_basis(const SmithForm& S, const IntMatrix& A) {
    std::vector<std::vector<Int>> out;
    for (int j = S.rank(); j < A.cols; ++j) {
        std::vector<Int> v(static_cast<std::size_t>(A.cols));
        for (int i = 0; i < A.cols; ++i) v[i] = S.Q(i, j);
        out.push_back(std::move(v));
    }
    return out;
}

std::optional<std::vector<int>> solve_mod2(const IntMatrix& A, const std::vector<int>& b) {
    const int R = A.rows, C = A.cols;
    std::vector<std::vector<int>> M(R, std::vector<int>(C + 1));
    for (int i = 0; i < R; ++i) {
        for (int j = 0; j < C; ++j) M[i][j] = static_cast<int>(abs_int(A(i, j)) % 2);
        M[i][C] = b[i] & 1;
    }
    std::vector<int> pivcol;
    int r = 0;
    for (int c = 0; c < C && r < R; ++c) {
        int p = -1;
        for (int i = r; i < R; ++i)
            if (M[i][c]) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(M[r], M[p]);
        for (int i = 0; i < R; ++i)
            if (i != r && M[i][c])
                for (int j = c; j <= C; ++j) M[i][j] ^= M[r][j];
        pivcol.push_back(c);
        ++r;
    }
    for (int i = r; i < R; ++i)
        if (M[i][C]) return std::nullopt;
    std::vector<int> x(C, 0);
    for (int i = 0; i < r; ++i) x[pivcol[i]] = M[i][C];
    return x;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RatMatrix& M) {
    std::vector<int> piv;
    int r = 0;
    for (int c = 0; c < M.cols && r < M.rows; ++c) {
        int p = -1;
        for (int i = r; i < M.rows; ++i)
            if (M(i, c) != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        if (p != r)
            for (int j = 0; j < M.cols; ++j) std::swap(M(r, j), M(p, j));
        Rat inv = 1 / M(r, c);
        for (int j = 0; j < M.cols; ++j) M(r, j) *= inv;
        for (int i = 0; i < M.rows; ++i) {
            if (i == r || M(i, c) == 0) continue;
            Rat m = M(i, c);
            for (int j = 0; j < M.cols; ++j) M(i, j) -= m * M(r, j);
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

}  // namespace

std::vector<std::vector<Rat>> nullspace(const RatMatrix& A) {
    RatMatrix M = A;
    auto piv = rref(M);
    std::vector<bool> is_piv(A.cols, false);
    for (int c : piv) is_piv[c] = true;
    std::vector<std::vector<Rat>> out;
    for (int f = 0; f < A.cols; ++f) {
        if (is_piv[f]) continue;
        std::vector<Rat> v(static_cast<std::size_t>(A.cols));
        v[f] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -M(static_cast<int>(i), f);
        out.push_back(std::move(v));
    }
    return out;
}

int rank(const RatMatrix& A) {
    RatMatrix M = A;
    return static_cast<int>(rref(M).size());
}

std::optional<std::vector<Rat>> feasible_point(const RatMatrix& A, const std::vector<Rat>& b,
                                               const std::vector<Rat>& lower) {
    const int m = A.rows, n = A.cols;
    // x = lower + y, y >= 0, A y = b - A lower; artificials a >= 0
    std::vector<Rat> rhs(b);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) rhs[i] -= A(i, j) * lower[j];
    // tableau: m rows, columns n + m + 1
    const int W = n + m + 1;
    std::vector<std::vector<Rat>> tab(m, std::vector<Rat>(W));
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) {
        int s = rhs[i] < 0 ? -1 : 1;
        for (int j = 0; j < n; ++j) tab[i][j] = s * A(i, j);
        tab[i][n + i] = 1;
        tab[i][W - 1] = s * rhs[i];
        basis[i] = n + i;
    }
    // objective: minimise sum of artificials -> reduced costs
    std::vector<Rat> cost(W);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < W; ++j)
            if (j < n || j == W - 1) cost[j] -= tab[i][j];
    while (true) {
        int enter = -1;
        for (int j = 0; j < n + m; ++j)
            if (cost[j] < 0) {
                enter = j;
                break;
            }
        if (enter < 0) break;
        int leave = -1;
        Rat best;
        for (int i = 0; i < m; ++i) {
            if (tab[i][enter] <= 0) continue;
            Rat ratio = tab[i][W - 1] / tab[i][enter];
            if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave < 0) break;  // unbounded phase-1 cannot happen; be safe
        Rat pv = tab[leave][enter];
        for (auto& x : tab[leave]) x /= pv;
        for (int i = 0; i < m; ++i) {
            if (i == leave || tab[i][enter] == 0) continue;
            Rat f = tab[i][enter];
            for (int j = 0; j < W; ++j) tab[i][j] -= f * tab[leave][j];
        }
        if (cost[enter] != 0) {
            Rat f = cost[enter];
            for (int j = 0; j < W; ++j) cost[j] -= f * tab[leave][j];
        }
        basis[leave] = enter;
    }
    if (cost[W - 1] != 0) return std::nullopt;  // -(sum of artificials) at optimum
    std::vector<Rat> x(lower);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) x[basis[i]] += tab[i][W - 1];
        else if (tab[i][W - 1] != 0) return std::nullopt;
    return x;
}

}  // namespace btw
