#include "nfkit/linalg.hpp"

#include <algorithm>
#include <map>

namespace nfkit {

Mat mat_identity(int n) {
    Mat a = mat_zero(n, n);
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = Scalar(1);
    return a;
}

Mat mat_zero(int rows, int cols) {
    return Mat(static_cast<std::size_t>(rows), Vec(static_cast<std::size_t>(cols), Scalar(0)));
}

Mat mat_mul(const Mat& a, const Mat& b) {
    std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    Mat r(n, Vec(m, Scalar(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            if (a[i][l].is_zero()) continue;
            for (std::size_t j = 0; j < m; ++j) r[i][j] += a[i][l] * b[l][j];
        }
    return r;
}

Mat mat_add(const Mat& a, const Mat& b) {
    Mat r = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) r[i][j] += b[i][j];
    return r;
}

Mat mat_sub(const Mat& a, const Mat& b) {
    Mat r = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) r[i][j] -= b[i][j];
    return r;
}

Mat mat_transpose(const Mat& a) {
    std::size_t n = a.size(), m = a.empty() ? 0 : a[0].size();
    Mat r(m, Vec(n, Scalar(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) r[j][i] = a[i][j];
    return r;
}

Vec mat_vec(const Mat& a, const Vec& v) {
    Vec r(a.size(), Scalar(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
    return r;
}

bool mat_is_zero(const Mat& a) {
    for (const auto& row : a)
        for (const auto& x : row)
            if (!x.is_zero()) return false;
    return true;
}

std::optional<Mat> mat_inverse(const Mat& a) {
    std::size_t n = a.size();
    Mat A = a, inv = mat_identity(static_cast<int>(n));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && A[pivot][col].is_zero()) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(A[pivot], A[col]);
        std::swap(inv[pivot], inv[col]);
        Scalar p = A[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            A[col][j] /= p;
            inv[col][j] /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col].is_zero()) continue;
            Scalar f = A[r][col];
            for (std::size_t j = 0; j < n; ++j) {
                A[r][j] -= f * A[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

Scalar mat_det(Mat a) {
    std::size_t n = a.size();
    Scalar det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col].is_zero()) ++pivot;
        if (pivot == n) return Scalar(0);
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            det = -det;
        }
        det *= a[col][col];
        Scalar p = a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (a[r][col].is_zero()) continue;
            Scalar f = a[r][col] / p;
            for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
        }
    }
    return det;
}

int mat_rank(Mat a) {
    std::size_t rows = a.size(), cols = a.empty() ? 0 : a[0].size();
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t pivot = row;
        while (pivot < rows && a[pivot][col].is_zero()) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[pivot], a[row]);
        Scalar p = a[row][col];
        for (std::size_t r = row + 1; r < rows; ++r) {
            if (a[r][col].is_zero()) continue;
            Scalar f = a[r][col] / p;
            for (std::size_t j = col; j < cols; ++j) a[r][j] -= f * a[row][j];
        }
        ++row;
        ++rank;
    }
    return rank;
}

std::optional<Vec> solve_linear(Mat A, Vec b) {
    std::size_t rows = A.size(), cols = A.empty() ? 0 : A[0].size();
    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t pivot = row;
        while (pivot < rows && A[pivot][col].is_zero()) ++pivot;
        if (pivot == rows) continue;
        std::swap(A[pivot], A[row]);
        std::swap(b[pivot], b[row]);
        Scalar p = A[row][col];
        for (std::size_t j = col; j < cols; ++j) A[row][j] /= p;
        b[row] /= p;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == row || A[r][col].is_zero()) continue;
            Scalar f = A[r][col];
            for (std::size_t j = col; j < cols; ++j) A[r][j] -= f * A[row][j];
            b[r] -= f * b[row];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t r = row; r < rows; ++r)
        if (!b[r].is_zero()) return std::nullopt;
    Vec x(cols, Scalar(0));
    for (std::size_t r = 0; r < pivot_col.size(); ++r) x[pivot_col[r]] = b[r];
    return x;
}

std::vector<Vec> nullspace(const Mat& A) {
    std::size_t rows = A.size(), cols = A.empty() ? 0 : A[0].size();
    Mat E = A;
    std::vector<long> pivot_of_col(cols, -1);
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t pivot = row;
        while (pivot < rows && E[pivot][col].is_zero()) ++pivot;
        if (pivot == rows) continue;
        std::swap(E[pivot], E[row]);
        Scalar p = E[row][col];
        for (std::size_t j = col; j < cols; ++j) E[row][j] /= p;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == row || E[r][col].is_zero()) continue;
            Scalar f = E[r][col];
            for (std::size_t j = col; j < cols; ++j) E[r][j] -= f * E[row][j];
        }
        pivot_of_col[col] = static_cast<long>(row);
        ++row;
    }
    std::vector<Vec> basis;
    for (std::size_t col = 0; col < cols; ++col) {
        if (pivot_of_col[col] >= 0) continue;
        Vec v(cols, Scalar(0));
        v[col] = Scalar(1);
        for (std::size_t c = 0; c < cols; ++c)
            if (pivot_of_col[c] >= 0) v[c] = -E[static_cast<std::size_t>(pivot_of_col[c])][col];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<Scalar> charpoly(const Mat& L) {
    int n = static_cast<int>(L.size());
    // Faddeev-LeVerrier: M_0 = I, c_n = 1; M_k = L M_{k-1} + c_{n-k+1} I ...
    std::vector<Scalar> c(static_cast<std::size_t>(n + 1), Scalar(0));
    c[static_cast<std::size_t>(n)] = Scalar(1);
    Mat M = mat_identity(n);
    for (int k = 1; k <= n; ++k) {
        Mat LM = mat_mul(L, M);
        Scalar tr(0);
        for (int j = 0; j < n; ++j) tr += LM[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
        Scalar ck = -(Scalar(1) / Scalar(k)) * tr;
        c[static_cast<std::size_t>(n - k)] = ck;
        M = LM;
        for (int j = 0; j < n; ++j) M[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] += ck;
    }
    return c;
}

namespace {

struct Gint {
    mpz_class re, im;
    mpz_class norm() const { return re * re + im * im; }
    bool is_zero() const { return re == 0 && im == 0; }
    Gint mul(const Gint& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
};

// Exact division in Z[i]; nullopt if b does not divide a.
std::optional<Gint> gint_div(const Gint& a, const Gint& b) {
    mpz_class n = b.norm();
    mpz_class nr = a.re * b.re + a.im * b.im;
    mpz_class ni = a.im * b.re - a.re * b.im;
    if (nr % n != 0 || ni % n != 0) return std::nullopt;
    return Gint{nr / n, ni / n};
}

// Gaussian prime factors of g (with multiplicity, units discarded).
std::vector<Gint> gint_factor(Gint g) {
    std::vector<Gint> factors;
    mpz_class nrm = g.norm();
    auto strip = [&](const Gint& p) {
        for (;;) {
            auto q = gint_div(g, p);
            if (!q) break;
            g = *q;
            factors.push_back(p);
        }
    };
    mpz_class p = 2;
    while (p * p <= nrm) {
        if (nrm % p == 0) {
            if (p == 2) {
                strip(Gint{1, 1});
            } else if (p % 4 == 3) {
                strip(Gint{p, 0});
            } else {
                // p = a^2 + b^2; brute force a.
                for (mpz_class a = 1; a * a * 2 <= p; ++a) {
                    mpz_class b2 = p - a * a;
                    if (mpz_perfect_square_p(b2.get_mpz_t())) {
                        mpz_class b;
                        mpz_sqrt(b.get_mpz_t(), b2.get_mpz_t());
                        strip(Gint{a, b});
                        strip(Gint{a, -b});
                        break;
                    }
                }
            }
            while (nrm % p == 0) nrm /= p;
        }
        ++p;
    }
    if (nrm > 1) {
        // Residual norm is a prime q; nrm = q with q = 1 mod 4 gives two
        // conjugate primes, q = 3 mod 4 cannot appear as a residual norm of a
        // nonzero Gaussian integer with multiplicity one... handle generally.
        mpz_class q = nrm;
        if (q % 4 == 3) {
            strip(Gint{q, 0});
        } else if (q == 2) {
            strip(Gint{1, 1});
        } else {
            for (mpz_class a = 1; a * a * 2 <= q; ++a) {
                mpz_class b2 = q - a * a;
                if (mpz_perfect_square_p(b2.get_mpz_t())) {
                    mpz_class b;
                    mpz_sqrt(b.get_mpz_t(), b2.get_mpz_t());
                    strip(Gint{a, b});
                    strip(Gint{a, -b});
                    break;
                }
            }
        }
    }
    return factors;
}

Scalar eval_poly(const std::vector<Scalar>& poly, const Scalar& x) {
    Scalar acc(0);
    for (std::size_t k = poly.size(); k-- > 0;) acc = acc * x + poly[k];
    return acc;
}

// Divide monic-led polynomial by (t - r); requires exact root.
std::vector<Scalar> deflate(const std::vector<Scalar>& poly, const Scalar& r) {
    std::size_t n = poly.size() - 1;
    std::vector<Scalar> q(n, Scalar(0));
    Scalar carry = poly[n];
    for (std::size_t k = n; k-- > 0;) {
        q[k] = carry;
        carry = poly[k] + carry * r;
    }
    return q;
}

} // namespace

std::optional<std::vector<Scalar>> roots_in_gaussian_rationals(std::vector<Scalar> poly) {
    while (poly.size() > 1 && poly.back().is_zero()) poly.pop_back();
    if (poly.size() <= 1) return std::vector<Scalar>{};
    // Normalize to monic.
    Scalar lead = poly.back();
    for (auto& c : poly) c /= lead;
    std::vector<Scalar> roots;
    // Strip zero roots.
    while (poly.size() > 1 && poly[0].is_zero()) {
        roots.push_back(Scalar(0));
        poly.erase(poly.begin());
    }
    while (poly.size() > 1) {
        std::size_t deg = poly.size() - 1;
        // Clear denominators: mu = d * t turns p into a monic Gaussian-integer poly.
        mpz_class d = 1;
        for (const auto& c : poly) {
            d = lcm(d, c.re.get_den());
            d = lcm(d, c.im.get_den());
        }
        // b_k = c_k * d^(deg - k); constant term b_0.
        mpq_class dq(d);
        mpq_class scale = 1;
        std::vector<Scalar> b(poly.size());
        for (std::size_t k = poly.size(); k-- > 0;) {
            b[k] = Scalar(mpq_class(poly[k].re * scale), mpq_class(poly[k].im * scale));
            scale *= dq;
        }
        Gint b0{b[0].re.get_num(), b[0].im.get_num()};
        auto primes = gint_factor(b0);
        // Enumerate divisors (products of subsets of the prime multiset) times units.
        std::vector<Gint> divisors = {Gint{1, 0}};
        for (const auto& pr : primes) {
            std::size_t count = divisors.size();
            for (std::size_t j = 0; j < count; ++j) divisors.push_back(divisors[j].mul(pr));
        }
        bool found = false;
        std::vector<Scalar> candidates;
        for (const auto& dv : divisors)
            for (int unit = 0; unit < 4; ++unit) {
                Gint u = dv;
                if (unit == 1) u = u.mul(Gint{0, 1});
                if (unit == 2) u = u.mul(Gint{-1, 0});
                if (unit == 3) u = u.mul(Gint{0, -1});
                candidates.push_back(Scalar(mpq_class(u.re), mpq_class(u.im)));
            }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        for (const auto& mu : candidates) {
            if (eval_poly(b, mu).is_zero()) {
                Scalar root = mu / Scalar(mpq_class(d));
                roots.push_back(root);
                poly = deflate(poly, root);
                while (poly.size() > 1 && poly[0].is_zero()) {
                    roots.push_back(Scalar(0));
                    poly.erase(poly.begin());
                }
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
        (void)deg;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::optional<Mat> symplectic_gram_schmidt(const Mat& A) {
    std::size_t dim = A.size();
    if (dim % 2 != 0) return std::nullopt;
    std::size_t m = dim / 2;
    auto pair_with = [&](const Vec& a, const Vec& b) {
        Scalar s(0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) s += a[i] * A[i][j] * b[j];
        return s;
    };
    std::vector<Vec> pool;
    for (std::size_t j = 0; j < dim; ++j) {
        Vec e(dim, Scalar(0));
        e[j] = Scalar(1);
        pool.push_back(e);
    }
    std::vector<Vec> firsts, seconds;
    while (!pool.empty()) {
        Vec v1 = pool.front();
        pool.erase(pool.begin());
        std::size_t partner = pool.size();
        for (std::size_t j = 0; j < pool.size(); ++j)
            if (!pair_with(v1, pool[j]).is_zero()) {
                partner = j;
                break;
            }
        if (partner == pool.size()) return std::nullopt; // degenerate
        Vec v2 = pool[partner];
        pool.erase(pool.begin() + static_cast<long>(partner));
        Scalar p = pair_with(v1, v2);
        for (auto& x : v2) x /= p;
        for (auto& e : pool) {
            Scalar a2 = pair_with(v2, e), a1 = pair_with(v1, e);
            for (std::size_t i = 0; i < dim; ++i) e[i] += a2 * v1[i] - a1 * v2[i];
        }
        firsts.push_back(v1);
        seconds.push_back(v2);
    }
    if (firsts.size() != m) return std::nullopt;
    Mat P = mat_zero(static_cast<int>(dim), static_cast<int>(dim));
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < dim; ++i) {
            P[i][k] = firsts[k][i];
            P[i][k + m] = seconds[k][i];
        }
    return P;
}

Vec SpanTracker::reduce(Vec v) const {
    for (const auto& row : rows_) {
        std::size_t lead = 0;
        while (lead < row.size() && row[lead].is_zero()) ++lead;
        if (lead < v.size() && !v[lead].is_zero()) {
            Scalar f = v[lead];
            for (std::size_t j = 0; j < v.size(); ++j) v[j] -= f * row[j];
        }
    }
    return v;
}

bool SpanTracker::add(Vec v) {
    v = reduce(std::move(v));
    std::size_t lead = 0;
    while (lead < v.size() && v[lead].is_zero()) ++lead;
    if (lead == v.size()) return false;
    Scalar p = v[lead];
    for (auto& x : v) x /= p;
    rows_.push_back(std::move(v));
    std::sort(rows_.begin(), rows_.end(), [](const Vec& a, const Vec& b) {
        std::size_t la = 0, lb = 0;
        while (la < a.size() && a[la].is_zero()) ++la;
        while (lb < b.size() && b[lb].is_zero()) ++lb;
        return la < lb;
    });
    return true;
}

bool SpanTracker::contains(Vec v) const {
    v = reduce(std::move(v));
    for (const auto& x : v)
        if (!x.is_zero()) return false;
    return true;
}

} // namespace nfkit
