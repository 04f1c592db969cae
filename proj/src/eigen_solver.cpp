// Dense nonsymmetric eigenvalue solver: Parlett-Reinsch balancing,
// Householder reduction to upper Hessenberg form, then Francis double-shift
// QR iteration with deflation. Real arithmetic throughout, so complex
// eigenvalues of real input emerge as exact conjugate pairs.
#include "amcsim/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace amcsim {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kSweepCap = 10000;

double sign_of(double magnitude, double carrier) {
    return carrier >= 0.0 ? std::fabs(magnitude) : -std::fabs(magnitude);
}

// Diagonal similarity scaling so row and column norms roughly match.
// Powers of two only, so no rounding error is introduced.
void balance(Matrix& a) {
    const std::size_t n = a.rows();
    constexpr double radix = 2.0;
    constexpr double radix_sq = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                r += std::fabs(a(i, j));
                c += std::fabs(a(j, i));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix_sq;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix_sq;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double ginv = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= ginv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Householder similarity reduction to upper Hessenberg (eigenvalues only).
void hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double scale = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) scale += std::fabs(a(i, k));
        if (scale == 0.0) continue;

        Vec v(n, 0.0);
        double norm_sq = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k) / scale;
            norm_sq += v[i] * v[i];
        }
        const double alpha = -sign_of(std::sqrt(norm_sq), v[k + 1]);
        v[k + 1] -= alpha;
        double vv = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vv += v[i] * v[i];
        if (vv == 0.0) continue;
        const double beta = 2.0 / vv;

        // A <- (I - beta v v^T) A
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
            s *= beta;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        // A <- A (I - beta v v^T)
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            s *= beta;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
        }
        a(k + 1, k) = alpha * scale;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

// Francis double-shift QR on an upper Hessenberg matrix. Destroys `a`.
std::vector<Complex> hessenberg_qr(Matrix& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<Complex> eig(static_cast<std::size_t>(n));

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(a(i, j));
    if (anorm == 0.0) return eig; // zero matrix

    std::size_t total_sweeps = 0;
    double t = 0.0;
    int nn = n - 1;
    while (nn >= 0) {
        int its = 0;
        int l;
        for (;;) {
            // Find a negligible subdiagonal entry to split the problem.
            for (l = nn; l >= 1; --l) {
                double s = std::fabs(a(l - 1, l - 1)) + std::fabs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::fabs(a(l, l - 1)) <= kEps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l < 0) l = 0;

            double x = a(nn, nn);
            if (l == nn) { // one real root deflates
                eig[static_cast<std::size_t>(nn)] = Complex(x + t, 0.0);
                --nn;
                break;
            }
            double y = a(nn - 1, nn - 1);
            double w = a(nn, nn - 1) * a(nn - 1, nn);
            if (l == nn - 1) { // 2x2 block deflates: real pair or exact conjugates
                double p = 0.5 * (y - x);
                double q = p * p + w;
                double z = std::sqrt(std::fabs(q));
                x += t;
                if (q >= 0.0) {
                    z = p + sign_of(z, p);
                    eig[static_cast<std::size_t>(nn - 1)] = Complex(x + z, 0.0);
                    eig[static_cast<std::size_t>(nn)] =
                        Complex(z != 0.0 ? x - w / z : x + z, 0.0);
                } else {
                    eig[static_cast<std::size_t>(nn - 1)] = Complex(x + p, z);
                    eig[static_cast<std::size_t>(nn)] = Complex(x + p, -z);
                }
                nn -= 2;
                break;
            }

            // No deflation yet: one double-shift QR sweep on rows l..nn.
            if (++total_sweeps > kSweepCap) {
                throw ConvergenceError("eigenvalue iteration did not converge", total_sweeps);
            }
            if (its == 10 || its == 20) { // exceptional shift against stagnation
                t += x;
                for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                double s = std::fabs(a(nn, nn - 1)) + std::fabs(a(nn - 1, nn - 2));
                y = x = 0.75 * s;
                w = -0.4375 * s * s;
            }
            ++its;

            double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
            int m;
            for (m = nn - 2; m >= l; --m) {
                z = a(m, m);
                double rr = x - z;
                double ss = y - z;
                p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
                q = a(m + 1, m + 1) - z - rr - ss;
                r = a(m + 2, m + 1);
                const double s = std::fabs(p) + std::fabs(q) + std::fabs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                const double u = std::fabs(a(m, m - 1)) * (std::fabs(q) + std::fabs(r));
                const double v = std::fabs(p) * (std::fabs(a(m - 1, m - 1)) + std::fabs(z) +
                                                 std::fabs(a(m + 1, m + 1)));
                if (u <= kEps * v) break;
            }
            for (int i = m + 2; i <= nn; ++i) {
                a(i, i - 2) = 0.0;
                if (i != m + 2) a(i, i - 3) = 0.0;
            }
            for (int k = m; k <= nn - 1; ++k) {
                if (k != m) {
                    p = a(k, k - 1);
                    q = a(k + 1, k - 1);
                    r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
                    x = std::fabs(p) + std::fabs(q) + std::fabs(r);
                    if (x != 0.0) {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                if (s == 0.0) continue;
                if (k == m) {
                    if (l != m) a(k, k - 1) = -a(k, k - 1);
                } else {
                    a(k, k - 1) = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;
                for (int j = k; j <= nn; ++j) { // row transform
                    double pp = a(k, j) + q * a(k + 1, j);
                    if (k != nn - 1) {
                        pp += r * a(k + 2, j);
                        a(k + 2, j) -= pp * z;
                    }
                    a(k + 1, j) -= pp * y;
                    a(k, j) -= pp * x;
                }
                const int mmin = std::min(nn, k + 3);
                for (int i = l; i <= mmin; ++i) { // column transform
                    double pp = x * a(i, k) + y * a(i, k + 1);
                    if (k != nn - 1) {
                        pp += z * a(i, k + 2);
                        a(i, k + 2) -= pp * r;
                    }
                    a(i, k + 1) -= pp * q;
                    a(i, k) -= pp;
                }
            }
        }
    }
    return eig;
}

} // namespace

Spectrum eigenvalues(const Matrix& a, std::size_t dim_cap) {
    if (!a.is_square()) throw DimensionError("eigenvalues requires a square matrix");
    if (a.rows() > dim_cap) {
        throw DimensionError("matrix dimension " + std::to_string(a.rows()) +
                             " exceeds eigensolver cap " + std::to_string(dim_cap));
    }

    // Work on a uniformly scaled copy to keep intermediates well in range.
    const double scale = a.max_abs();
    Spectrum sp;
    sp.source_dim = a.rows();
    if (scale == 0.0) {
        sp.values.assign(a.rows(), Complex(0.0, 0.0));
        return sp;
    }
    Matrix work = a;
    work *= 1.0 / scale;
    balance(work);
    hessenberg(work);
    sp.values = hessenberg_qr(work);
    for (Complex& v : sp.values) v *= scale;
    std::sort(sp.values.begin(), sp.values.end(), [](const Complex& u, const Complex& v) {
        if (u.real() != v.real()) return u.real() < v.real();
        return u.imag() < v.imag();
    });
    return sp;
}

} // namespace amcsim
