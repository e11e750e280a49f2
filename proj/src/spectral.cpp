#include "nfkit/spectral.hpp"

#include <algorithm>
#include <numeric>

#include "nfkit/error.hpp"

namespace nfkit {

namespace {

Mat mat_pow(const Mat& M, int k) {
    Mat r = mat_identity(static_cast<int>(M.size()));
    for (int j = 0; j < k; ++j) r = mat_mul(r, M);
    return r;
}

} // namespace

SNDecomposition sn_decomposition(const Mat& L) {
    int n = static_cast<int>(L.size());
    auto roots = roots_in_gaussian_rationals(charpoly(L));
    if (!roots) fail(ErrorCode::EigenvaluesNotInField, "characteristic polynomial does not split over Q(i)");
    // Distinct eigenvalues with algebraic multiplicities, sorted.
    std::vector<std::pair<Scalar, int>> spectrum;
    for (const auto& r : *roots) {
        if (!spectrum.empty() && spectrum.back().first == r)
            ++spectrum.back().second;
        else
            spectrum.emplace_back(r, 1);
    }

    std::vector<Vec> columns;
    std::vector<Scalar> col_eigs;
    std::vector<JordanBlock> blocks;
    for (const auto& [lambda, mult] : spectrum) {
        Mat M = L;
        for (int j = 0; j < n; ++j) M[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] -= lambda;
        // Kernel filtration K_1 subset K_2 subset ... up to dimension mult.
        std::vector<std::vector<Vec>> kernels; // kernels[s-1] = basis of ker M^s
        int smax = 0;
        for (int s = 1; s <= n; ++s) {
            auto ker = nullspace(mat_pow(M, s));
            kernels.push_back(ker);
            smax = s;
            if (static_cast<int>(ker.size()) == mult) break;
        }
        // Chains, longest first: tops of level s complement K_{s-1} + M(longer tops).
        struct Chain {
            Vec top;
            int level;
        };
        std::vector<Chain> chains;
        for (int s = smax; s >= 1; --s) {
            SpanTracker base;
            if (s >= 2)
                for (const auto& v : kernels[static_cast<std::size_t>(s - 2)]) base.add(v);
            for (const auto& ch : chains) {
                Vec img = ch.top;
                for (int j = 0; j < ch.level - s; ++j) img = mat_vec(M, img);
                base.add(img);
            }
            for (const auto& w : kernels[static_cast<std::size_t>(s - 1)])
                if (base.add(w)) chains.push_back({w, s});
        }
        for (const auto& ch : chains) {
            // Basis segment M^{l-1}v, ..., Mv, v gives one Jordan block.
            std::vector<Vec> seg(static_cast<std::size_t>(ch.level));
            seg[static_cast<std::size_t>(ch.level - 1)] = ch.top;
            for (int j = ch.level - 2; j >= 0; --j)
                seg[static_cast<std::size_t>(j)] = mat_vec(M, seg[static_cast<std::size_t>(j + 1)]);
            for (auto& v : seg) {
                columns.push_back(v);
                col_eigs.push_back(lambda);
            }
            blocks.push_back({lambda, ch.level});
        }
    }
    if (static_cast<int>(columns.size()) != n)
        fail(ErrorCode::Internal, "jordan basis incomplete");
    Mat C = mat_zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            C[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    auto Cinv = mat_inverse(C);
    if (!Cinv) fail(ErrorCode::Internal, "jordan basis singular");
    Mat D = mat_zero(n, n);
    for (int j = 0; j < n; ++j) D[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = col_eigs[static_cast<std::size_t>(j)];
    Mat S = mat_mul(C, mat_mul(D, *Cinv));
    Mat Npart = mat_sub(L, S);
    return SNDecomposition{S, Npart, EigenData{col_eigs, C, blocks}};
}

Scalar monomial_pairing(const Monomial& alpha, const std::vector<Scalar>& gamma) {
    Scalar s(0);
    for (std::size_t j = 0; j < gamma.size(); ++j)
        s += Scalar(static_cast<long>(alpha.e[j])) * gamma[j];
    return s;
}

long monomial_weight(const Monomial& alpha, const std::vector<long>& zrow) {
    long w = 0;
    for (std::size_t j = 0; j < zrow.size(); ++j) w += static_cast<long>(alpha.e[j]) * zrow[j];
    return w;
}

std::vector<Monomial> enumerate_monomials(int nvars, int lo, int hi) {
    std::vector<Monomial> out;
    Monomial m(nvars);
    // Recursive enumeration, then canonical sort.
    std::vector<Monomial> stack;
    std::function<void(int, int)> rec = [&](int var, int remaining) {
        if (var == nvars - 1) {
            for (int e = 0; e <= remaining; ++e) {
                m.e[static_cast<std::size_t>(var)] = static_cast<unsigned>(e);
                if (m.degree() >= lo && m.degree() <= hi) out.push_back(m);
            }
            m.e[static_cast<std::size_t>(var)] = 0;
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            m.e[static_cast<std::size_t>(var)] = static_cast<unsigned>(e);
            rec(var + 1, remaining - e);
        }
        m.e[static_cast<std::size_t>(var)] = 0;
    };
    rec(0, hi);
    std::sort(out.begin(), out.end(), [](const Monomial& a, const Monomial& b) { return GrlexLess{}(a, b); });
    return out;
}

ResonanceLattice resonance_lattice(const std::vector<Scalar>& gamma, int N) {
    int n = static_cast<int>(gamma.size());
    ResonanceLattice lat;
    lat.trunc = N;
    for (const auto& alpha : enumerate_monomials(n, 0, N)) {
        Scalar p = monomial_pairing(alpha, gamma);
        if (p.is_zero()) lat.kernel_monomials.push_back(alpha);
        if (alpha.degree() >= 2)
            for (int i = 0; i < n; ++i)
                if (p == gamma[static_cast<std::size_t>(i)]) lat.vf_resonances.emplace_back(alpha, i);
    }
    return lat;
}

namespace {

// Row-style Hermite normal form (unimodular row operations), positive pivots.
void hermite_rows(std::vector<std::vector<long>>& Z) {
    std::size_t rows = Z.size();
    if (rows == 0) return;
    std::size_t cols = Z[0].size();
    std::size_t r = 0;
    for (std::size_t col = 0; col < cols && r < rows; ++col) {
        for (;;) {
            std::size_t best = rows;
            for (std::size_t i = r; i < rows; ++i)
                if (Z[i][col] != 0 && (best == rows || std::abs(Z[i][col]) < std::abs(Z[best][col]))) best = i;
            if (best == rows) break;
            std::swap(Z[r], Z[best]);
            bool others = false;
            for (std::size_t i = r + 1; i < rows; ++i) {
                if (Z[i][col] == 0) continue;
                long q = Z[i][col] / Z[r][col];
                for (std::size_t j = 0; j < cols; ++j) Z[i][j] -= q * Z[r][j];
                if (Z[i][col] != 0) others = true;
            }
            if (!others) break;
        }
        if (Z[r][col] == 0) continue;
        if (Z[r][col] < 0)
            for (std::size_t j = 0; j < cols; ++j) Z[r][j] = -Z[r][j];
        for (std::size_t i = 0; i < r; ++i) {
            long q = Z[i][col] / Z[r][col];
            if (Z[i][col] % Z[r][col] < 0) --q; // floor division for canonical residues
            for (std::size_t j = 0; j < cols; ++j) Z[i][j] -= q * Z[r][j];
        }
        ++r;
    }
}

} // namespace

ToricAction toric_generators(const std::vector<Scalar>& gamma) {
    int n = static_cast<int>(gamma.size());
    // Q-rank of the eigenvalues inside Q(i) = Q^2; gauge: first independent ones.
    std::vector<Scalar> basis;
    {
        SpanTracker tracker;
        for (const auto& g : gamma) {
            Vec v = {Scalar(g.re), Scalar(g.im)};
            if (tracker.add(v)) basis.push_back(g);
        }
    }
    int tau = static_cast<int>(basis.size());
    ToricAction action;
    action.tau = tau;
    if (tau == 0) return action;

    // Rational coordinates of each gamma_j in the basis.
    std::vector<std::vector<mpq_class>> Zq(static_cast<std::size_t>(tau),
                                           std::vector<mpq_class>(static_cast<std::size_t>(n)));
    for (int j = 0; j < n; ++j) {
        Mat A = mat_zero(2, tau);
        for (int k = 0; k < tau; ++k) {
            A[0][static_cast<std::size_t>(k)] = Scalar(basis[static_cast<std::size_t>(k)].re);
            A[1][static_cast<std::size_t>(k)] = Scalar(basis[static_cast<std::size_t>(k)].im);
        }
        Vec b = {Scalar(gamma[static_cast<std::size_t>(j)].re), Scalar(gamma[static_cast<std::size_t>(j)].im)};
        auto x = solve_linear(A, b);
        if (!x) fail(ErrorCode::Internal, "toric coordinate solve failed");
        for (int k = 0; k < tau; ++k) Zq[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = (*x)[static_cast<std::size_t>(k)].re;
    }
    mpz_class den = 1;
    for (const auto& row : Zq)
        for (const auto& q : row) den = lcm(den, q.get_den());
    std::vector<std::vector<long>> Z(static_cast<std::size_t>(tau), std::vector<long>(static_cast<std::size_t>(n)));
    for (int k = 0; k < tau; ++k)
        for (int j = 0; j < n; ++j) {
            mpq_class scaled = Zq[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] * mpq_class(den);
            Z[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = static_cast<long>(scaled.get_num().get_si());
        }
    hermite_rows(Z);
    for (auto& row : Z) {
        long g = 0;
        for (long v : row) g = std::gcd(g, std::abs(v));
        if (g > 1)
            for (auto& v : row) v /= g;
    }
    action.Z = Z;
    // Recover rho exactly from gamma = rho * Z.
    Mat A = mat_zero(n, tau);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < tau; ++k)
            A[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = Scalar(Z[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
    auto rho = solve_linear(A, gamma);
    if (!rho) fail(ErrorCode::Internal, "toric rho solve failed");
    action.rho.assign(rho->begin(), rho->begin() + tau);
    // Exactness check.
    for (int j = 0; j < n; ++j) {
        Scalar s(0);
        for (int k = 0; k < tau; ++k)
            s += action.rho[static_cast<std::size_t>(k)] * Scalar(Z[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
        if (s != gamma[static_cast<std::size_t>(j)]) fail(ErrorCode::Internal, "toric reconstruction failed");
    }
    return action;
}

std::optional<Mat> joint_diagonalize(const std::vector<Mat>& mats) {
    if (mats.empty()) return std::nullopt;
    int n = static_cast<int>(mats[0].size());
    std::vector<std::vector<Vec>> blocks;
    {
        std::vector<Vec> full;
        for (int j = 0; j < n; ++j) {
            Vec e(static_cast<std::size_t>(n), Scalar(0));
            e[static_cast<std::size_t>(j)] = Scalar(1);
            full.push_back(e);
        }
        blocks.push_back(full);
    }
    for (const auto& M : mats) {
        std::vector<std::vector<Vec>> refined;
        for (const auto& block : blocks) {
            int k = static_cast<int>(block.size());
            // Representation R of M restricted to the block: M*B = B*R.
            Mat Bmat = mat_zero(n, k);
            for (int j = 0; j < k; ++j)
                for (int i = 0; i < n; ++i)
                    Bmat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = block[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            Mat R = mat_zero(k, k);
            for (int j = 0; j < k; ++j) {
                Vec img = mat_vec(M, block[static_cast<std::size_t>(j)]);
                auto coords = solve_linear(Bmat, img);
                if (!coords) return std::nullopt; // block not invariant
                for (int i = 0; i < k; ++i) R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (*coords)[static_cast<std::size_t>(i)];
            }
            auto roots = roots_in_gaussian_rationals(charpoly(R));
            if (!roots) return std::nullopt;
            std::vector<Scalar> distinct;
            for (const auto& r : *roots)
                if (distinct.empty() || !(distinct.back() == r)) distinct.push_back(r);
            int total = 0;
            for (const auto& lambda : distinct) {
                Mat Rm = R;
                for (int j = 0; j < k; ++j) Rm[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] -= lambda;
                auto ker = nullspace(Rm);
                if (ker.empty()) continue;
                std::vector<Vec> sub;
                for (const auto& c : ker) {
                    Vec v(static_cast<std::size_t>(n), Scalar(0));
                    for (int j = 0; j < k; ++j)
                        for (int i = 0; i < n; ++i)
                            v[static_cast<std::size_t>(i)] += c[static_cast<std::size_t>(j)] * block[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
                    sub.push_back(v);
                }
                total += static_cast<int>(sub.size());
                refined.push_back(sub);
            }
            if (total != k) return std::nullopt; // not semisimple on this block
        }
        blocks = refined;
    }
    Mat C = mat_zero(n, n);
    int col = 0;
    for (const auto& block : blocks)
        for (const auto& v : block) {
            if (col >= n) return std::nullopt;
            for (int i = 0; i < n; ++i) C[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] = v[static_cast<std::size_t>(i)];
            ++col;
        }
    if (col != n) return std::nullopt;
    if (!mat_inverse(C)) return std::nullopt;
    return C;
}

} // namespace nfkit
