#include "nfkit/pdnormal.hpp"

#include <algorithm>

#include "nfkit/error.hpp"

namespace nfkit {

namespace {

bool is_diagonal(const Mat& L) {
    for (std::size_t i = 0; i < L.size(); ++i)
        for (std::size_t j = 0; j < L.size(); ++j)
            if (i != j && !L[i][j].is_zero()) return false;
    return true;
}

Mat diag_of(const std::vector<Scalar>& gamma) {
    std::size_t n = gamma.size();
    Mat D(n, Vec(n, Scalar(0)));
    for (std::size_t i = 0; i < n; ++i) D[i][i] = gamma[i];
    return D;
}

std::vector<Scalar> diag_entries(const Mat& L) {
    std::vector<Scalar> g;
    g.reserve(L.size());
    for (std::size_t i = 0; i < L.size(); ++i) g.push_back(L[i][i]);
    return g;
}

// Scale each monomial component by 1/(<alpha,gamma> - gamma_i); input must be
// supported off the resonant set.
VectorFieldJet invert_ad_s(const VectorFieldJet& W, const std::vector<Scalar>& gamma) {
    VectorFieldJet r(W.nvars, W.trunc);
    for (int i = 0; i < W.nvars; ++i)
        for (const auto& [m, c] : W.comp(i).terms()) {
            Scalar lambda = monomial_pairing(m, gamma) - gamma[static_cast<std::size_t>(i)];
            if (lambda.is_zero())
                fail(ErrorCode::Internal, "resonant component reached the semisimple inverse");
            r.comp(i).add_term(m, c / lambda);
        }
    return r;
}

struct DiagonalSplit {
    VectorFieldJet res;
    VectorFieldJet nonres;
};

DiagonalSplit split_resonant(const VectorFieldJet& V, const std::vector<Scalar>& gamma) {
    DiagonalSplit s{VectorFieldJet(V.nvars, V.trunc), VectorFieldJet(V.nvars, V.trunc)};
    for (int i = 0; i < V.nvars; ++i)
        for (const auto& [m, c] : V.comp(i).terms()) {
            Scalar lambda = monomial_pairing(m, gamma) - gamma[static_cast<std::size_t>(i)];
            (lambda.is_zero() ? s.res : s.nonres).comp(i).add_term(m, c);
        }
    return s;
}

// Solve [L, U] = V_nonres with L = diag(gamma) + Nmat, via the finite Neumann
// series against the nilpotent part.
HomologicalSplit diagonal_solve(const VectorFieldJet& V, const std::vector<Scalar>& gamma, const Mat& Nmat) {
    DiagonalSplit s = split_resonant(V, gamma);
    VectorFieldJet U(V.nvars, V.trunc);
    if (!s.nonres.is_zero()) {
        VectorFieldJet nfield = VectorFieldJet::linear(V.trunc, Nmat);
        VectorFieldJet term = invert_ad_s(s.nonres, gamma);
        U = term;
        for (int it = 0; it < 256 && !term.is_zero(); ++it) {
            VectorFieldJet next = lie_bracket(nfield, term);
            if (next.is_zero()) {
                term = next;
                break;
            }
            term = -invert_ad_s(next, gamma);
            U = U + term;
        }
        if (!term.is_zero()) fail(ErrorCode::Internal, "nilpotent Neumann series did not terminate");
        Mat L = mat_add(diag_of(gamma), Nmat);
        VectorFieldJet check = lie_bracket(VectorFieldJet::linear(V.trunc, L), U);
        if (!(check == s.nonres)) fail(ErrorCode::Internal, "homological solve verification failed");
    }
    return HomologicalSplit{U, s.res};
}

// I when L is already diagonal, else the Jordan-basis change.
Mat jordan_change(const Mat& L) {
    if (is_diagonal(L)) return mat_identity(static_cast<int>(L.size()));
    return sn_decomposition(L).eig.change_of_basis;
}

void check_weights(const VectorFieldJet& U, const std::vector<Vec>& extras) {
    for (const Vec& w : extras)
        for (int i = 0; i < U.nvars; ++i)
            for (const auto& [m, c] : U.comp(i).terms())
                if (!(monomial_pairing(m, w) - w[static_cast<std::size_t>(i)]).is_zero())
                    fail(ErrorCode::WeightViolation, "correction leaves the constrained weight space");
}

std::vector<std::pair<Monomial, int>> nonlinear_support(const VectorFieldJet& X) {
    std::vector<std::pair<Monomial, int>> out;
    for (int i = 0; i < X.nvars; ++i)
        for (const auto& [m, c] : X.comp(i).terms())
            if (m.degree() >= 2) out.emplace_back(m, i);
    return out;
}

PDResult pd_core(const VectorFieldJet& X, int N, const std::vector<Vec>& extras) {
    int n = X.nvars, tr = X.trunc;
    if (N > tr) fail(ErrorCode::DimensionMismatch, "normalization degree exceeds the truncation");
    if (!X.vanishes_at_origin()) fail(ErrorCode::ConstantTermNonzero, "vector field must vanish at the origin");
    Mat L = X.linear_part();
    Mat C = jordan_change(L);
    VectorFieldJet cur = X;
    FormalMap Phi = FormalMap::identity(n, tr);
    if (!(C == mat_identity(n))) {
        auto Cinv = mat_inverse(C);
        if (!Cinv) fail(ErrorCode::Internal, "Jordan change is singular");
        Phi = FormalMap::linear(tr, *Cinv);
        cur = pushforward(Phi, X);
    }
    Mat J = cur.linear_part();
    std::vector<Scalar> gamma = diag_entries(J);
    Mat Nmat = mat_sub(J, diag_of(gamma));
    for (int d = 2; d <= N; ++d) {
        HomologicalSplit hs = diagonal_solve(cur.graded_part(d), gamma, Nmat);
        check_weights(hs.U, extras);
        if (hs.U.is_zero()) continue;
        FormalMap flow = time1_flow(-hs.U);
        cur = pushforward(flow, cur);
        Phi = map_compose(flow, Phi);
        if (!(cur.graded_part(d) == hs.V_res))
            fail(ErrorCode::Internal, "degree step did not reach the resonant part");
    }
    PDResult r{cur, Phi, nonlinear_support(cur.truncated(N)), toric_generators(gamma), gamma, C};
    return r;
}

} // namespace

HomologicalSplit homological_solve(const VectorFieldJet& V, const Mat& L) {
    if (V.is_zero()) return HomologicalSplit{V, V};
    int d = V.order();
    if (d < 2) fail(ErrorCode::OrderTooLow, "homological solve needs degree at least 2");
    if (!(V.graded_part(d) == V))
        fail(ErrorCode::DimensionMismatch, "homological solve expects a homogeneous field");
    Mat C = jordan_change(L);
    if (C == mat_identity(V.nvars)) {
        std::vector<Scalar> gamma = diag_entries(L);
        return diagonal_solve(V, gamma, mat_sub(L, diag_of(gamma)));
    }
    auto Cinv = mat_inverse(C);
    if (!Cinv) fail(ErrorCode::Internal, "Jordan change is singular");
    VectorFieldJet Vj = pushforward(FormalMap::linear(V.trunc, *Cinv), V);
    Mat J = mat_mul(*Cinv, mat_mul(L, C));
    std::vector<Scalar> gamma = diag_entries(J);
    HomologicalSplit hs = diagonal_solve(Vj, gamma, mat_sub(J, diag_of(gamma)));
    FormalMap back = FormalMap::linear(V.trunc, C);
    return HomologicalSplit{pushforward(back, hs.U), pushforward(back, hs.V_res)};
}

PDResult pd_normalize(const VectorFieldJet& X, int N) { return pd_core(X, N, {}); }

PDResult pd_normalize_constrained(const VectorFieldJet& X, int N, const std::vector<Vec>& diagonals) {
    return pd_core(X, N, diagonals);
}

PDResult equivariant_pd_normalize(const VectorFieldJet& X, const ToricAction& weights, int N) {
    std::vector<Vec> extras;
    for (const auto& zrow : weights.Z) {
        Vec w;
        w.reserve(zrow.size());
        for (long z : zrow) w.push_back(Scalar(z));
        extras.push_back(std::move(w));
    }
    for (const Vec& w : extras)
        for (int i = 0; i < X.nvars; ++i)
            for (const auto& [m, c] : X.comp(i).terms())
                if (!(monomial_pairing(m, w) - w[static_cast<std::size_t>(i)]).is_zero())
                    fail(ErrorCode::WeightViolation, "field has a nonzero-weight term");
    // Weights transform along the Jordan change; its columns stay inside a
    // single weight class because the linear part is weight-homogeneous.
    Mat C = jordan_change(X.linear_part());
    int n = X.nvars;
    std::vector<Vec> moved;
    for (const Vec& w : extras) {
        Vec wj(static_cast<std::size_t>(n), Scalar(0));
        for (int j = 0; j < n; ++j) {
            bool seen = false;
            for (int i = 0; i < n; ++i) {
                if (C[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_zero()) continue;
                if (!seen) {
                    wj[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(i)];
                    seen = true;
                } else if (!(wj[static_cast<std::size_t>(j)] == w[static_cast<std::size_t>(i)])) {
                    fail(ErrorCode::Internal, "Jordan change mixes weight classes");
                }
            }
        }
        moved.push_back(std::move(wj));
    }
    return pd_core(X, N, moved);
}

static Mat gram_of(const FormJet& omega0) {
    if (omega0.degree() != 2) fail(ErrorCode::DimensionMismatch, "symplectic form must be a 2-form");
    int n = omega0.nvars();
    Mat A(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), Scalar(0)));
    for (const auto& [idx, c] : omega0.comps()) {
        if (!(c == Jet::constant(n, c.trunc(), c.constant_term())))
            fail(ErrorCode::DimensionMismatch, "symplectic form must have constant coefficients");
        Scalar v = c.constant_term();
        A[static_cast<std::size_t>(idx[0])][static_cast<std::size_t>(idx[1])] = v;
        A[static_cast<std::size_t>(idx[1])][static_cast<std::size_t>(idx[0])] = -v;
    }
    return A;
}

VectorFieldJet hamiltonian_field(const Jet& F, const FormJet& omega0) {
    Mat A = gram_of(omega0);
    auto Ainv = mat_inverse(A);
    if (!Ainv) fail(ErrorCode::DegenerateSymplecticForm, "symplectic form is degenerate");
    int n = F.nvars();
    VectorFieldJet X(n, F.trunc());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Scalar& a = (*Ainv)[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            if (a.is_zero()) continue;
            X.comp(i) += a * jet_partial(F, j);
        }
    return X;
}

// Symplectic linear change diagonalizing a semisimple Hamiltonian matrix; the
// constant form must pair coordinates one-to-one.
static Mat symplectic_diagonalizer(const Mat& L, const Mat& A) {
    int n = static_cast<int>(L.size());
    std::vector<int> partner(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        int cnt = 0;
        for (int j = 0; j < n; ++j)
            if (!A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_zero()) {
                partner[static_cast<std::size_t>(i)] = j;
                ++cnt;
            }
        if (cnt != 1)
            fail(ErrorCode::HypothesisFailed,
                 "symplectic form must pair coordinates one-to-one for the linear step");
    }
    SNDecomposition sn = sn_decomposition(L);
    if (!mat_is_zero(sn.N_part))
        fail(ErrorCode::HypothesisFailed, "quadratic part with a nilpotent piece must come pre-aligned");
    // Distinct eigenvalues with their eigenspaces.
    std::vector<Scalar> distinct;
    for (const Scalar& ev : sn.eig.eigenvalues)
        if (std::find(distinct.begin(), distinct.end(), ev) == distinct.end()) distinct.push_back(ev);
    std::sort(distinct.begin(), distinct.end());
    std::map<Scalar, std::vector<Vec>> spaces;
    for (const Scalar& ev : distinct) {
        Mat M = mat_sub(L, diag_of(std::vector<Scalar>(static_cast<std::size_t>(n), ev)));
        spaces.emplace(ev, nullspace(M));
    }
    auto omega = [&](const Vec& u, const Vec& v) {
        Scalar s(0);
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                s = s + u[static_cast<std::size_t>(p)] * A[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] *
                            v[static_cast<std::size_t>(q)];
        return s;
    };
    Mat C(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), Scalar(0)));
    std::vector<bool> placed(static_cast<std::size_t>(n), false);
    std::map<Scalar, std::size_t> used; // eigenvectors consumed per eigenvalue
    for (const Scalar& ev : distinct) used.emplace(ev, 0);
    for (int i = 0; i < n; ++i) {
        if (placed[static_cast<std::size_t>(i)]) continue;
        int j = partner[static_cast<std::size_t>(i)];
        if (j < 0 || partner[static_cast<std::size_t>(j)] != i || placed[static_cast<std::size_t>(j)])
            fail(ErrorCode::HypothesisFailed, "symplectic pairing pattern is inconsistent");
        // Pick the smallest eigenvalue with capacity whose negative also has capacity.
        bool done = false;
        for (const Scalar& ev : distinct) {
            Scalar nev = Scalar(0) - ev;
            auto itp = spaces.find(ev), itm = spaces.find(nev);
            if (itm == spaces.end()) continue;
            if (used.at(ev) >= itp->second.size()) continue;
            if (nev == ev) {
                if (itp->second.size() - used.at(ev) < 2) continue;
            } else if (used.at(nev) >= itm->second.size()) {
                continue;
            }
            Vec v = itp->second[used.at(ev)];
            used.at(ev) += 1;
            Vec w = itm->second[used.at(nev)];
            used.at(nev) += 1;
            Scalar g = omega(v, w);
            if (g.is_zero()) fail(ErrorCode::HypothesisFailed, "eigenvector pairing degenerated");
            Scalar target = A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            Scalar scale = target / g;
            for (int r = 0; r < n; ++r) {
                C[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(r)];
                C[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
                    scale * w[static_cast<std::size_t>(r)];
            }
            placed[static_cast<std::size_t>(i)] = placed[static_cast<std::size_t>(j)] = true;
            done = true;
            break;
        }
        if (!done) fail(ErrorCode::HypothesisFailed, "could not pair eigenvalues symplectically");
    }
    // The construction is heuristic; these two checks are the guarantee.
    Mat G(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), Scalar(0)));
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            Vec cp(static_cast<std::size_t>(n)), cq(static_cast<std::size_t>(n));
            for (int r = 0; r < n; ++r) {
                cp[static_cast<std::size_t>(r)] = C[static_cast<std::size_t>(r)][static_cast<std::size_t>(p)];
                cq[static_cast<std::size_t>(r)] = C[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)];
            }
            G[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = omega(cp, cq);
        }
    if (!(G == A)) fail(ErrorCode::HypothesisFailed, "symplectic diagonalization does not preserve the form");
    auto Cinv = mat_inverse(C);
    if (!Cinv) fail(ErrorCode::HypothesisFailed, "eigenvector pairing produced a singular change");
    if (!is_diagonal(mat_mul(*Cinv, mat_mul(L, C))))
        fail(ErrorCode::HypothesisFailed, "symplectic diagonalization failed");
    return C;
}

BirkhoffResult birkhoff_normalize(const Jet& H, const FormJet& omega0, int N) {
    int n = H.nvars(), tr = H.trunc();
    if (N > tr) fail(ErrorCode::DimensionMismatch, "normalization degree exceeds the truncation");
    if (!H.constant_term().is_zero() || !H.graded_part(1).is_zero())
        fail(ErrorCode::ConstantTermNonzero, "Hamiltonian must have a zero 1-jet");
    Mat A = gram_of(omega0);
    if (!mat_inverse(A)) fail(ErrorCode::DegenerateSymplecticForm, "symplectic form is degenerate");
    Jet H2 = H.graded_part(2);
    Mat L = hamiltonian_field(H2, omega0).linear_part();
    Jet cur = H;
    FormalMap Phi = FormalMap::identity(n, tr);
    if (!is_diagonal(L)) {
        SNDecomposition sn = sn_decomposition(L);
        if (!mat_is_zero(sn.N_part)) {
            if (!is_diagonal(sn.S))
                fail(ErrorCode::HypothesisFailed,
                     "quadratic part with a nilpotent piece must come pre-aligned");
        } else {
            Mat C = symplectic_diagonalizer(L, A);
            auto Cinv = mat_inverse(C);
            Phi = FormalMap::linear(tr, *Cinv);
            cur = jet_compose(H, FormalMap::linear(tr, C));
        }
    }
    Jet cur2 = cur.graded_part(2);
    Mat Lc = hamiltonian_field(cur2, omega0).linear_part();
    std::vector<Scalar> gamma = diag_entries(Lc);
    Mat Nmat = mat_sub(Lc, diag_of(gamma));
    VectorFieldJet nfield = VectorFieldJet::linear(tr, Nmat);
    for (int k = 3; k <= N; ++k) {
        Jet B = cur.graded_part(k);
        Jet nonres(n, tr);
        for (const auto& [m, c] : B.terms())
            if (!monomial_pairing(m, gamma).is_zero()) nonres.add_term(m, c);
        if (nonres.is_zero()) continue;
        auto invS = [&](const Jet& f) {
            Jet r(n, tr);
            for (const auto& [m, c] : f.terms()) r.add_term(m, c / monomial_pairing(m, gamma));
            return r;
        };
        Jet term = invS(nonres);
        Jet F = term;
        for (int it = 0; it < 256 && !term.is_zero(); ++it) {
            Jet next = nfield.apply(term);
            if (next.is_zero()) break;
            term = -invS(next);
            F += term;
        }
        F = -F; // X_{H2}(F) must cancel the nonresonant part
        VectorFieldJet XF = hamiltonian_field(F, omega0);
        FormalMap fwd = time1_flow(XF);
        cur = jet_compose(cur, time1_flow(-XF));
        Phi = map_compose(fwd, Phi);
        Jet left = cur.graded_part(k);
        for (const auto& [m, c] : left.terms())
            if (!monomial_pairing(m, gamma).is_zero())
                fail(ErrorCode::Internal, "Birkhoff step did not reach the resonant part");
    }
    return BirkhoffResult{cur, Phi, gamma};
}

bool is_resonant_field(const std::vector<Scalar>& gamma, const VectorFieldJet& X) {
    for (int i = 0; i < X.nvars; ++i)
        for (const auto& [m, c] : X.comp(i).terms())
            if (m.degree() >= 2 &&
                !(monomial_pairing(m, gamma) - gamma[static_cast<std::size_t>(i)]).is_zero())
                return false;
    return true;
}

} // namespace nfkit
