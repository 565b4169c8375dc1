#include "mpmimo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

#include "mpmimo/errors.hpp"
#include "mpmimo/kernels.hpp"

namespace mpmimo {

namespace {

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Jacobi rotation parameters making the rotated pair orthogonal:
// tau = (beta - alpha) / (2|gamma|), t = sgn(tau) / (|tau| + sqrt(1 + tau^2)).
void jacobi_cs(double alpha, double beta, double gamma_abs, double& c, double& sigma) {
    const double tau = (beta - alpha) / (2.0 * gamma_abs);
    const double t = sgn(tau) / (std::abs(tau) + std::hypot(1.0, tau));
    c = 1.0 / std::sqrt(1.0 + t * t);
    sigma = c * t;
}

}  // namespace

CMat operator*(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix product inner dimension mismatch");
    CMat c(a.rows(), b.cols());
    if (a.rows() == 0 || b.cols() == 0 || a.cols() == 0) return c;
    kernels::matmul(a.rows(), a.cols(), b.cols(), a.data(), a.cols(), b.data(), b.cols(),
                    c.data(), c.cols());
    return c;
}

CMat transpose(const CMat& a) {
    CMat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

CMat conjugate(const CMat& a) {
    CMat c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = std::conj(a(i, j));
    return c;
}

CMat adjoint(const CMat& a) {
    CMat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
    return t;
}

cd trace(const CMat& a) {
    if (!a.square()) throw DimensionMismatch("trace needs a square matrix");
    cd t(0.0, 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

double fro_norm(const CMat& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a.data()[i]);
    return std::sqrt(s);
}

double max_abs(const CMat& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i]));
    return m;
}

CMat kron(const CMat& a, const CMat& b) {
    CMat k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ia = 0; ia < a.rows(); ++ia)
        for (std::size_t ja = 0; ja < a.cols(); ++ja) {
            const cd f = a(ia, ja);
            if (f == cd(0.0, 0.0)) continue;
            for (std::size_t ib = 0; ib < b.rows(); ++ib)
                for (std::size_t jb = 0; jb < b.cols(); ++jb)
                    k(ia * b.rows() + ib, ja * b.cols() + jb) = f * b(ib, jb);
        }
    return k;
}

CMat vec(const CMat& a) {
    CMat v(a.rows() * a.cols(), 1);
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) v(j * a.rows() + i, 0) = a(i, j);
    return v;
}

CMat unvec(const CMat& v, std::size_t rows, std::size_t cols) {
    if (v.cols() != 1 || v.rows() != rows * cols)
        throw DimensionMismatch("unvec expects a rows*cols column vector");
    CMat a(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) a(i, j) = v(j * rows + i, 0);
    return a;
}

CMat diag_matrix(const std::vector<cd>& d) {
    CMat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMat diag_matrix(const std::vector<double>& d) {
    CMat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = cd(d[i], 0.0);
    return m;
}

std::vector<cd> diag_of(const CMat& a) {
    const std::size_t n = std::min(a.rows(), a.cols());
    std::vector<cd> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
    return d;
}

CMat diag_part(const CMat& a) {
    CMat m(a.rows(), a.cols());
    const std::size_t n = std::min(a.rows(), a.cols());
    for (std::size_t i = 0; i < n; ++i) m(i, i) = a(i, i);
    return m;
}

CMat hermitian_part(const CMat& a) {
    if (!a.square()) throw DimensionMismatch("Hermitian part needs a square matrix");
    CMat m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    return m;
}

CMat cholesky_lower(const CMat& a) {
    if (!a.square()) throw DimensionMismatch("Cholesky needs a square matrix");
    const std::size_t n = a.rows();
    CMat l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > 0.0)) throw NotPositiveDefinite("Cholesky pivot is not positive");
        const double ljj = std::sqrt(d);
        l(j, j) = cd(ljj, 0.0);
        for (std::size_t i = j + 1; i < n; ++i) {
            cd s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    return l;
}

CMat hermitian_solve(const CMat& a, const CMat& b) {
    if (a.rows() != b.rows()) throw DimensionMismatch("hermitian_solve shape mismatch");
    const CMat l = cholesky_lower(a);
    const std::size_t n = l.rows();
    const std::size_t m = b.cols();
    CMat x = b;
    // L y = b
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k)
            for (std::size_t j = 0; j < m; ++j) x(i, j) -= l(i, k) * x(k, j);
        for (std::size_t j = 0; j < m; ++j) x(i, j) /= l(i, i);
    }
    // L^H x = y
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k)
            for (std::size_t j = 0; j < m; ++j) x(ii, j) -= std::conj(l(k, ii)) * x(k, j);
        for (std::size_t j = 0; j < m; ++j) x(ii, j) /= std::conj(l(ii, ii));
    }
    return x;
}

CMat solve(const CMat& a, const CMat& b) {
    if (!a.square()) throw DimensionMismatch("solve needs a square matrix");
    if (a.rows() != b.rows()) throw DimensionMismatch("solve shape mismatch");
    const std::size_t n = a.rows();
    const std::size_t m = b.cols();
    CMat lu = a;
    CMat x = b;
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t piv = j;
        double pmax = std::abs(lu(j, j));
        for (std::size_t i = j + 1; i < n; ++i) {
            const double v = std::abs(lu(i, j));
            if (v > pmax) {
                pmax = v;
                piv = i;
            }
        }
        if (pmax < 1e-300) throw SingularMatrix("zero pivot in LU factorization");
        if (piv != j) {
            for (std::size_t k = 0; k < n; ++k) std::swap(lu(j, k), lu(piv, k));
            for (std::size_t k = 0; k < m; ++k) std::swap(x(j, k), x(piv, k));
        }
        for (std::size_t i = j + 1; i < n; ++i) {
            const cd f = lu(i, j) / lu(j, j);
            if (f == cd(0.0, 0.0)) continue;
            for (std::size_t k = j + 1; k < n; ++k) lu(i, k) -= f * lu(j, k);
            for (std::size_t k = 0; k < m; ++k) x(i, k) -= f * x(j, k);
        }
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k)
            for (std::size_t j = 0; j < m; ++j) x(ii, j) -= lu(ii, k) * x(k, j);
        for (std::size_t j = 0; j < m; ++j) x(ii, j) /= lu(ii, ii);
    }
    return x;
}

CMat inverse(const CMat& a) { return solve(a, CMat::identity(a.rows())); }

SvdResult svd(const CMat& a) {
    if (a.rows() < a.cols()) {
        SvdResult r = svd(adjoint(a));
        return {std::move(r.v), std::move(r.s), std::move(r.u)};
    }
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (n == 0) return {CMat(m, 0), {}, CMat(0, 0)};

    CMat w = a;  // columns get rotated toward mutual orthogonality
    CMat v = CMat::identity(n);
    const double eps = 1e-13;
    const std::size_t max_sweeps = 100 * std::max<std::size_t>(m, n);

    std::size_t sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0;
                cd gamma(0.0, 0.0);
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += std::norm(w(i, p));
                    beta += std::norm(w(i, q));
                    gamma += std::conj(w(i, p)) * w(i, q);
                }
                const double g = std::abs(gamma);
                if (alpha == 0.0 || beta == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                double c, sig;
                jacobi_cs(alpha, beta, g, c, sig);
                const cd s = sig * (gamma / g);
                const cd sc = std::conj(s);
                for (std::size_t i = 0; i < m; ++i) {
                    const cd wp = w(i, p), wq = w(i, q);
                    w(i, p) = c * wp - sc * wq;
                    w(i, q) = s * wp + c * wq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cd vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - sc * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
    if (sweep == max_sweeps) throw ConvergenceFailure("SVD Jacobi sweeps exhausted");

    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < m; ++i) nrm += std::norm(w(i, j));
        s[j] = std::sqrt(nrm);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return s[i] > s[j]; });

    SvdResult r{CMat(m, n), std::vector<double>(n), CMat(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        r.s[j] = s[src];
        const double inv = s[src] > 0.0 ? 1.0 / s[src] : 0.0;
        for (std::size_t i = 0; i < m; ++i) r.u(i, j) = w(i, src) * inv;
        for (std::size_t i = 0; i < n; ++i) r.v(i, j) = v(i, src);
    }
    return r;
}

double spectral_norm(const CMat& a) {
    if (a.size() == 0) return 0.0;
    const SvdResult r = svd(a);
    return r.s.empty() ? 0.0 : r.s.front();
}

double cond2(const CMat& a) {
    const SvdResult r = svd(a);
    if (r.s.empty()) return 0.0;
    const double smin = r.s.back();
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return r.s.front() / smin;
}

EigResult hermitian_eig(const CMat& a) {
    if (!a.square()) throw DimensionMismatch("eigendecomposition needs a square matrix");
    const std::size_t n = a.rows();
    CMat h = (a + adjoint(a)) * 0.5;
    CMat v = CMat::identity(n);
    const double fro0 = fro_norm(h);
    if (n == 0 || fro0 == 0.0) return {std::vector<double>(n, 0.0), std::move(v)};
    const double tol = 1e-15 * fro0;
    const std::size_t max_sweeps = 100;

    std::size_t sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cd g = h(p, q);
                const double gabs = std::abs(g);
                if (gabs <= tol) continue;
                rotated = true;
                double c, sig;
                jacobi_cs(h(p, p).real(), h(q, q).real(), gabs, c, sig);
                const cd s = sig * (g / gabs);
                const cd sc = std::conj(s);
                for (std::size_t i = 0; i < n; ++i) {  // H <- H J
                    const cd hp = h(i, p), hq = h(i, q);
                    h(i, p) = c * hp - sc * hq;
                    h(i, q) = s * hp + c * hq;
                }
                for (std::size_t i = 0; i < n; ++i) {  // H <- J^H H
                    const cd hp = h(p, i), hq = h(q, i);
                    h(p, i) = c * hp - s * hq;
                    h(q, i) = sc * hp + c * hq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cd vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - sc * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
    if (sweep == max_sweeps) throw ConvergenceFailure("eigendecomposition Jacobi sweeps exhausted");

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = h(i, i).real();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return w[i] < w[j]; });

    EigResult r{std::vector<double>(n), CMat(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        r.w[j] = w[order[j]];
        for (std::size_t i = 0; i < n; ++i) r.vectors(i, j) = v(i, order[j]);
    }
    return r;
}

namespace {

CMat herm_function(const CMat& a, bool inverse_sqrt) {
    const EigResult e = hermitian_eig(a);
    double wmax = 0.0;
    for (double w : e.w) wmax = std::max(wmax, std::abs(w));
    const std::size_t n = a.rows();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        double w = e.w[i];
        if (w < -1e-8 * wmax)
            throw NotPositiveDefinite("matrix has a negative eigenvalue");
        if (inverse_sqrt) {
            if (w <= 1e-14 * wmax)
                throw NotPositiveDefinite("matrix is singular, cannot invert square root");
            f[i] = 1.0 / std::sqrt(w);
        } else {
            f[i] = std::sqrt(std::max(w, 0.0));
        }
    }
    return e.vectors * diag_matrix(f) * adjoint(e.vectors);
}

}  // namespace

CMat herm_sqrt(const CMat& a) { return herm_function(a, false); }

CMat herm_inv_sqrt(const CMat& a) { return herm_function(a, true); }

}  // namespace mpmimo
