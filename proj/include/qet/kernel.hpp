// kernel.hpp — dense complex matrix substrate: storage, products, Kronecker
// products, one-sided Jacobi SVD, unitarity tests.
//
// Everything here is a pure function of immutable values; matrices are small
// (qudit dimensions d <= 16), so no attempt is made at sparse storage or
// cache blocking.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qet {

using cxd = std::complex<double>;

// Central numerical tolerances.
// EPS_ORTHO: orthonormality / reconstruction tolerance for decompositions.
// EPS_RANK_REL: rank cutoff, relative to the largest singular value.
inline constexpr double EPS_ORTHO = 1e-10;
inline constexpr double EPS_RANK_REL = 1e-12;

// Dense complex matrix, row-major storage.
class CMatrix {
  public:
    CMatrix() : rows_(0), cols_(0) {}
    CMatrix(int rows, int cols, cxd fill = cxd(0.0, 0.0))
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {
        if (rows <= 0 || cols <= 0)
            throw std::invalid_argument("CMatrix: dimensions must be positive");
    }
    CMatrix(int rows, int cols, std::vector<cxd> entries)
        : rows_(rows), cols_(cols), a_(std::move(entries)) {
        if (rows <= 0 || cols <= 0)
            throw std::invalid_argument("CMatrix: dimensions must be positive");
        if (a_.size() != static_cast<size_t>(rows) * cols)
            throw std::invalid_argument("CMatrix: entry count does not match shape");
    }

    static CMatrix identity(int n) {
        CMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static CMatrix zero(int rows, int cols) { return CMatrix(rows, cols); }
    static CMatrix diagonal(const std::vector<cxd>& d) {
        CMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cxd& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const cxd& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    const std::vector<cxd>& data() const { return a_; }

    bool is_finite() const {
        for (const cxd& z : a_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    double frobenius_norm2() const {
        double s = 0.0;
        for (const cxd& z : a_) s += std::norm(z);
        return s;
    }
    double frobenius_norm() const { return std::sqrt(frobenius_norm2()); }

    cxd trace() const {
        cxd t = 0.0;
        for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    CMatrix transpose() const {
        CMatrix m(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
        return m;
    }
    CMatrix conjugate() const {
        CMatrix m(rows_, cols_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) m(r, c) = std::conj((*this)(r, c));
        return m;
    }
    CMatrix adjoint() const {
        CMatrix m(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    CMatrix& operator+=(const CMatrix& o) {
        require_same_shape(o, "operator+=");
        for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o) {
        require_same_shape(o, "operator-=");
        for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    CMatrix& operator*=(cxd s) {
        for (cxd& z : a_) z *= s;
        return *this;
    }

  private:
    void require_same_shape(const CMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string("CMatrix: shape mismatch in ") + op);
    }

    int rows_, cols_;
    std::vector<cxd> a_;
};

inline CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
inline CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
inline CMatrix operator*(CMatrix a, cxd s) { return a *= s; }
inline CMatrix operator*(cxd s, CMatrix a) { return a *= s; }

inline CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("CMatrix: shape mismatch in operator*");
    CMatrix m(a.rows(), b.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int k = 0; k < a.cols(); ++k) {
            const cxd ark = a(r, k);
            if (ark == cxd(0.0, 0.0)) continue;
            for (int c = 0; c < b.cols(); ++c) m(r, c) += ark * b(k, c);
        }
    return m;
}

// Kronecker product: (kron(A,B))[ia*rB+ib, ja*cB+jb] = A[ia,ja]*B[ib,jb].
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (int ia = 0; ia < a.rows(); ++ia)
        for (int ja = 0; ja < a.cols(); ++ja) {
            const cxd w = a(ia, ja);
            if (w == cxd(0.0, 0.0)) continue;
            for (int ib = 0; ib < b.rows(); ++ib)
                for (int jb = 0; jb < b.cols(); ++jb)
                    m(ia * b.rows() + ib, ja * b.cols() + jb) = w * b(ib, jb);
        }
    return m;
}

// ||M^dag M - 1||_F; zero (within EPS_ORTHO) iff M is unitary.
inline double unitarity_defect(const CMatrix& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("unitarity_defect: matrix must be square");
    CMatrix g = m.adjoint() * m;
    for (int i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
    return g.frobenius_norm();
}

struct SvdResult {
    CMatrix u;                  // m x k, orthonormal columns (k = min(m, n))
    std::vector<double> sigma;  // k singular values, sorted descending
    CMatrix vh;                 // k x n, orthonormal rows
};

namespace detail {

// One-sided Jacobi on the columns of w (m x n, m >= n). v accumulates the
// right rotations. Columns of w end up mutually orthogonal.
inline void jacobi_orthogonalize(CMatrix& w, CMatrix& v) {
    const int n = w.cols();
    const int m = w.rows();
    const double tol = 1e-15;
    for (int sweep = 0; sweep < 64; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0;
                cxd apq = 0.0;
                for (int i = 0; i < m; ++i) {
                    app += std::norm(w(i, p));
                    aqq += std::norm(w(i, q));
                    apq += std::conj(w(i, p)) * w(i, q);
                }
                const double off = std::abs(apq);
                if (off <= tol * std::sqrt(app * aqq) || off == 0.0) continue;
                rotated = true;
                // Phase-rotate column q so the inner product becomes real,
                // then apply a real Jacobi rotation.
                const cxd phase = apq / off;
                const double tau = (aqq - app) / (2.0 * off);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (int i = 0; i < m; ++i) {
                    const cxd wq = w(i, q) * std::conj(phase);
                    const cxd wp = w(i, p);
                    w(i, p) = cs * wp - sn * wq;
                    w(i, q) = sn * wp + cs * wq;
                }
                for (int i = 0; i < n; ++i) {
                    const cxd vq = v(i, q) * std::conj(phase);
                    const cxd vp = v(i, p);
                    v(i, p) = cs * vp - sn * vq;
                    v(i, q) = sn * vp + cs * vq;
                }
            }
        }
        if (!rotated) break;
    }
}

// Orthonormal completion for (near-)null columns of u against the already
// accepted columns: the canonical basis vector with the largest residual
// after projection.
inline void complete_column(CMatrix& u, int col) {
    const int m = u.rows();
    std::vector<cxd> best(m, 0.0);
    double best_nrm2 = -1.0;
    for (int candidate = 0; candidate < m; ++candidate) {
        std::vector<cxd> vec(m, 0.0);
        vec[candidate] = 1.0;
        for (int c = 0; c < u.cols(); ++c) {
            if (c == col) continue;
            cxd proj = 0.0;
            for (int i = 0; i < m; ++i) proj += std::conj(u(i, c)) * vec[i];
            for (int i = 0; i < m; ++i) vec[i] -= proj * u(i, c);
        }
        double nrm2 = 0.0;
        for (const cxd& z : vec) nrm2 += std::norm(z);
        if (nrm2 > best_nrm2) {
            best_nrm2 = nrm2;
            best = std::move(vec);
        }
    }
    if (best_nrm2 < 1e-12)
        throw std::runtime_error("svd: failed to complete orthonormal basis");
    const double inv = 1.0 / std::sqrt(best_nrm2);
    for (int i = 0; i < m; ++i) u(i, col) = best[i] * inv;
}

inline SvdResult svd_tall(const CMatrix& a) {
    const int m = a.rows(), n = a.cols();
    CMatrix w = a;
    CMatrix v = CMatrix::identity(n);
    jacobi_orthogonalize(w, v);

    std::vector<double> sigma(n);
    for (int j = 0; j < n; ++j) {
        double s2 = 0.0;
        for (int i = 0; i < m; ++i) s2 += std::norm(w(i, j));
        sigma[j] = std::sqrt(s2);
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return sigma[x] > sigma[y]; });

    SvdResult r;
    r.u = CMatrix(m, n);
    r.vh = CMatrix(n, n);
    r.sigma.resize(n);
    const double smax = sigma[order[0]];
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        r.sigma[j] = sigma[src];
        if (sigma[src] > smax * 1e-14 && sigma[src] > 0.0) {
            const double inv = 1.0 / sigma[src];
            for (int i = 0; i < m; ++i) r.u(i, j) = w(i, src) * inv;
        } else {
            r.sigma[j] = sigma[src];
        }
        for (int i = 0; i < n; ++i) r.vh(j, i) = std::conj(v(i, src));
    }
    for (int j = 0; j < n; ++j) {
        double cn = 0.0;
        for (int i = 0; i < m; ++i) cn += std::norm(r.u(i, j));
        if (cn < 0.5) complete_column(r.u, j);
    }
    return r;
}

}  // namespace detail

// Singular value decomposition M = U diag(sigma) Vh with economy shapes.
// Contract: reconstruction and orthonormality hold within EPS_ORTHO
// (relative to ||M||_F); singular values sorted descending.
inline SvdResult svd(const CMatrix& m) {
    if (!m.is_finite())
        throw std::invalid_argument("svd: input has non-finite entries");
    if (m.rows() >= m.cols()) return detail::svd_tall(m);
    // Wide case via the adjoint: M^dag = U S Vh  =>  M = Vh^dag S U^dag.
    SvdResult t = detail::svd_tall(m.adjoint());
    SvdResult r;
    r.u = t.vh.adjoint();
    r.sigma = std::move(t.sigma);
    r.vh = t.u.adjoint();
    return r;
}

inline CMatrix svd_reconstruct(const SvdResult& s) {
    CMatrix us = s.u;
    for (int j = 0; j < us.cols(); ++j)
        for (int i = 0; i < us.rows(); ++i) us(i, j) *= s.sigma[static_cast<size_t>(j)];
    return us * s.vh;
}

}  // namespace qet
