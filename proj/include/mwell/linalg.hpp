#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "mwell/error.hpp"
#include "mwell/specfun.hpp"

namespace mwell {

/// Dense square matrix, column-major.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[j * n_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * n_ + i]; }
    double* column(std::size_t j) { return data_.data() + j * n_; }
    const double* column(std::size_t j) const { return data_.data() + j * n_; }
    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    double max_asymmetry() const
    {
        double worst = 0.0;
        double scale = 0.0;
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t i = 0; i < n_; ++i) {
                worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
                scale = std::max(scale, std::abs((*this)(i, j)));
            }
        return scale > 0.0 ? worst / scale : 0.0;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Symmetric band matrix, lower storage with one extra diagonal of room for
/// the bulge created during reduction. Entry (i, j), 0 <= i - j <= b + 1, lives
/// at j * (b + 2) + (i - j).
class BandMatrix {
public:
    BandMatrix() = default;
    BandMatrix(std::size_t n, std::size_t bandwidth) : n_(n), b_(bandwidth), data_(n * (bandwidth + 2), 0.0) {}

    std::size_t size() const { return n_; }
    std::size_t bandwidth() const { return b_; }

    double get(std::size_t i, std::size_t j) const
    {
        if (i < j)
            std::swap(i, j);
        if (i - j > b_ + 1 || i >= n_)
            return 0.0;
        return data_[j * (b_ + 2) + (i - j)];
    }

    void set(std::size_t i, std::size_t j, double v)
    {
        if (i < j)
            std::swap(i, j);
        if (i - j > b_ + 1) {
            detail::require(std::abs(v) < 1e-300 || v == 0.0, ErrorKind::domain, "diag",
                            "write outside band storage");
            return;
        }
        data_[j * (b_ + 2) + (i - j)] = v;
    }

    /// Bytes held by the storage.
    std::size_t memory_bytes() const { return data_.size() * sizeof(double); }

    DenseMatrix to_dense() const
    {
        DenseMatrix out(n_);
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t i = j; i < std::min(n_, j + b_ + 1); ++i) {
                out(i, j) = get(i, j);
                out(j, i) = get(i, j);
            }
        return out;
    }

private:
    std::size_t n_ = 0;
    std::size_t b_ = 0;
    std::vector<double> data_;
};

/// Symmetric tridiagonal matrix: diagonal d, off-diagonal e (e[i] couples i and i+1).
struct Tridiagonal {
    std::vector<double> d;
    std::vector<double> e;
};

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    DenseMatrix vectors;         // column k is the eigenvector of values[k]; empty if not requested
};

namespace detail {

/// Householder reduction of a symmetric matrix to tridiagonal form (tred2).
/// On return v holds the accumulated transformation when accumulate is set.
inline Tridiagonal householder(DenseMatrix& v, bool accumulate)
{
    const std::size_t n = v.size();
    std::vector<double> d(n), e(n);
    if (n == 0)
        return {};
    for (std::size_t j = 0; j < n; ++j)
        d[j] = v(n - 1, j);

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < i; ++k)
            scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0)
                g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j)
                e[j] = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                const double* col = v.column(j);
                for (std::size_t k = j + 1; k <= i - 1; ++k) {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j)
                e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                double* col = v.column(j);
                for (std::size_t k = j; k <= i - 1; ++k)
                    col[k] -= (f * e[k] + g * d[k]);
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    if (!accumulate) {
        Tridiagonal t;
        t.d.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            t.d[j] = v(j, j);
        t.e.assign(e.begin() + 1, e.end());
        return t;
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k)
                d[k] = v(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                const double* ci = v.column(i + 1);
                double* cj = v.column(j);
                for (std::size_t k = 0; k <= i; ++k)
                    g += ci[k] * cj[k];
                for (std::size_t k = 0; k <= i; ++k)
                    cj[k] -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k)
            v(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    Tridiagonal t;
    t.d = d;
    t.e.assign(e.begin() + 1, e.end());
    return t;
}

} // namespace detail

/// Implicit-shift QL on a symmetric tridiagonal matrix (tql2). If z is given it
/// must hold the transformation that produced the tridiagonal form (identity
/// for a plain tridiagonal problem) and receives the eigenvectors.
inline std::vector<double> tridiagonal_ql(Tridiagonal t, DenseMatrix* z = nullptr, std::size_t max_sweeps = 60)
{
    const std::size_t n = t.d.size();
    auto& d = t.d;
    std::vector<double> e(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
        e[i] = t.e[i];
    const double eps = std::numeric_limits<double>::epsilon();
    double f = 0.0;
    double tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1)
                break;
            ++m;
        }
        if (m == n)
            m = n - 1;
        if (m > l) {
            std::size_t iter = 0;
            do {
                detail::require(++iter <= max_sweeps, ErrorKind::convergence, "diag",
                                "QL iteration did not converge");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0)
                    r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i)
                    d[i] -= h;
                f += h;
                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    if (z) {
                        double* zi = z->column(ii);
                        double* zi1 = z->column(ii + 1);
                        for (std::size_t k = 0; k < n; ++k) {
                            h = zi1[k];
                            zi1[k] = s * zi[k] + c * h;
                            zi[k] = c * zi[k] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    std::vector<double> sorted(n);
    for (std::size_t k = 0; k < n; ++k)
        sorted[k] = d[order[k]];
    if (z) {
        DenseMatrix zs(n);
        for (std::size_t k = 0; k < n; ++k)
            std::copy(z->column(order[k]), z->column(order[k]) + n, zs.column(k));
        *z = std::move(zs);
    }
    return sorted;
}

/// Full symmetric eigensolver: Householder tridiagonalization + implicit QL.
inline EigenDecomposition eigh(DenseMatrix a, bool want_vectors = true)
{
    EigenDecomposition out;
    if (a.size() == 0)
        return out;
    auto t = detail::householder(a, want_vectors);
    if (want_vectors) {
        out.values = tridiagonal_ql(std::move(t), &a);
        out.vectors = std::move(a);
    } else {
        out.values = tridiagonal_ql(std::move(t), nullptr);
    }
    return out;
}

/// Reduces a symmetric band matrix to tridiagonal form by Givens rotations with
/// bulge chasing (Schwarz). Work O(n^2 b), storage O(n b). Eigenvalues only.
inline Tridiagonal band_to_tridiagonal(BandMatrix a)
{
    const std::size_t n = a.size();
    const std::size_t b = a.bandwidth();
    // Similarity rotation in plane (p, p+1) with [c s; -s c] acting on rows.
    auto rotate = [&](std::size_t p, double c, double s) {
        const std::size_t q = p + 1;
        const std::size_t lo = p >= b + 1 ? p - b - 1 : 0;
        const std::size_t hi = std::min(n - 1, q + b + 1);
        for (std::size_t m = lo; m <= hi; ++m) {
            if (m == p || m == q)
                continue;
            const double x = a.get(p, m);
            const double y = a.get(q, m);
            if (x == 0.0 && y == 0.0)
                continue;
            a.set(p, m, c * x + s * y);
            a.set(q, m, -s * x + c * y);
        }
        const double app = a.get(p, p);
        const double aqq = a.get(q, q);
        const double apq = a.get(p, q);
        a.set(p, p, c * c * app + 2 * c * s * apq + s * s * aqq);
        a.set(q, q, s * s * app - 2 * c * s * apq + c * c * aqq);
        a.set(p, q, c * s * (aqq - app) + (c * c - s * s) * apq);
    };
    // Zero entry (r, k) using rows r-1 and r.
    auto annihilate = [&](std::size_t r, std::size_t k) {
        const double x = a.get(r - 1, k);
        const double y = a.get(r, k);
        if (y == 0.0)
            return false;
        const double rho = std::hypot(x, y);
        rotate(r - 1, x / rho, y / rho);
        a.set(r, k, 0.0);
        return true;
    };

    if (b > 1) {
        for (std::size_t k = 0; k + 2 < n; ++k) {
            for (std::size_t r = std::min(n - 1, k + b); r >= k + 2; --r) {
                if (!annihilate(r, k))
                    continue;
                // The rotation of rows (r-1, r) fills (r-1+b+1, r-1); chase it down.
                std::size_t col = r - 1;
                std::size_t row = r + b;
                while (row < n) {
                    if (!annihilate(row, col))
                        break;
                    col = row - 1;
                    row += b;
                }
            }
        }
    }
    Tridiagonal t;
    t.d.resize(n);
    t.e.resize(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i)
        t.d[i] = a.get(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i)
        t.e[i] = a.get(i + 1, i);
    return t;
}

inline std::vector<double> band_eigenvalues(BandMatrix a)
{
    return tridiagonal_ql(band_to_tridiagonal(std::move(a)), nullptr);
}

/// Number of eigenvalues of t strictly below x (Sturm sequence count).
inline std::size_t sturm_count(const Tridiagonal& t, double x)
{
    std::size_t count = 0;
    double q = 1.0;
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < t.d.size(); ++i) {
        const double off = i > 0 ? t.e[i - 1] : 0.0;
        q = t.d[i] - x - (i > 0 ? off * off / q : 0.0);
        if (q == 0.0)
            q = -tiny;
        if (q < 0.0)
            ++count;
    }
    return count;
}

/// The k lowest eigenvalues of a tridiagonal matrix by bisection on the Sturm count.
inline std::vector<double> tridiagonal_lowest(const Tridiagonal& t, std::size_t k)
{
    const std::size_t n = t.d.size();
    detail::require(k <= n, ErrorKind::domain, "diag", "more levels requested than matrix rows");
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(t.e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(t.e[i]) : 0.0);
        lo = std::min(lo, t.d[i] - r);
        hi = std::max(hi, t.d[i] + r);
    }
    std::vector<double> out(k);
    for (std::size_t j = 0; j < k; ++j) {
        double a = j > 0 ? out[j - 1] : lo;
        double b = hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b)
                break;
            if (sturm_count(t, mid) > j)
                b = mid;
            else
                a = mid;
        }
        out[j] = 0.5 * (a + b);
    }
    return out;
}

/// Gauss-Hermite rule of order q for the weight exp(-t^2). Nodes from the
/// Jacobi matrix (Golub-Welsch); weights from the Christoffel function of the
/// orthonormal Hermite functions, which stays accurate where exp(-t^2)
/// underflows. The weight returned is the plain-integral weight
/// w_q exp(t_q^2), so sum_q W_q f(t_q) approximates the integral of f.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussHermite gauss_hermite(std::size_t q)
{
    detail::require(q >= 1, ErrorKind::domain, "diag", "quadrature order must be positive");
    Tridiagonal jac;
    jac.d.assign(q, 0.0);
    jac.e.resize(q - 1);
    for (std::size_t k = 1; k < q; ++k)
        jac.e[k - 1] = std::sqrt(0.5 * static_cast<double>(k));
    GaussHermite out;
    out.nodes = tridiagonal_ql(jac, nullptr);
    out.weights.resize(q);
    for (std::size_t i = 0; i < q; ++i) {
        // psi_k(t) with omega = 1 are orthonormal against dt.
        const auto psi = ho_functions(static_cast<int>(q) - 1, out.nodes[i], 1.0);
        double s = 0.0;
        for (double v : psi)
            s += v * v;
        out.weights[i] = 1.0 / s;
    }
    return out;
}

} // namespace mwell
