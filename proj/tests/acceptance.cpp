// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.
#include <cstdio>
#include <random>
#include <string>

#include "nfkit/certificate.hpp"
#include "nfkit/contact.hpp"
#include "nfkit/pdnormal.hpp"
#include "nfkit/toriclaw.hpp"

using namespace nfkit;

namespace {

int checks_run = 0;
int checks_failed = 0;

void expect(bool ok) {
    ++checks_run;
    if (!ok) ++checks_failed;
}

Jet jx(int n, int N, int i) { return Jet::variable(n, N, i); }

IndexTuple full(int n) {
    IndexTuple idx;
    for (int i = 0; i < n; ++i) idx.push_back(i);
    return idx;
}

FormJet top_form(const Jet& f) {
    FormJet w(f.nvars(), f.trunc(), f.nvars());
    w.add(full(f.nvars()), f);
    return w;
}

Jet random_jet(std::mt19937_64& rng, int n, int N, int lo) {
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<int> coin(0, 4);
    std::uniform_int_distribution<int> im(0, 7);
    Jet f(n, N);
    for (const Monomial& m : enumerate_monomials(n, lo, N))
        if (coin(rng) == 0)
            f.add_term(m, im(rng) == 0 ? Scalar(coeff(rng)) + Scalar(coeff(rng)) * Scalar::i()
                                       : Scalar(coeff(rng)));
    return f;
}

FormJet random_one_form(std::mt19937_64& rng, int n, int N) {
    FormJet w(n, N, 1);
    for (int i = 0; i < n; ++i) w.add({i}, random_jet(rng, n, N, 0));
    return w;
}

VectorFieldJet random_field(std::mt19937_64& rng, int n, int N) {
    VectorFieldJet X(n, N);
    for (int i = 0; i < n; ++i) X.comp(i) = random_jet(rng, n, N, 1);
    return X;
}

FormalMap random_tangent_map(std::mt19937_64& rng, int n, int N) {
    std::uniform_int_distribution<int> coeff(-2, 2);
    std::uniform_int_distribution<int> coin(0, 3);
    FormalMap phi = FormalMap::identity(n, N);
    for (int i = 0; i < n; ++i)
        for (const Monomial& m : enumerate_monomials(n, 2, std::min(N, 3)))
            if (coin(rng) == 0) phi.comp(i).add_term(m, Scalar(coeff(rng)));
    return phi;
}

// --- criterion 1: jet-algebra soundness -----------------------------------

bool criterion1() {
    std::mt19937_64 rng(101);
    checks_run = checks_failed = 0;
    for (int it = 0; it < 60; ++it) {
        int n = 2 + it % 2, N = 5;
        Jet f = random_jet(rng, n, N, 0), g = random_jet(rng, n, N, 0), h = random_jet(rng, n, N, 0);
        expect((f * g) * h == f * (g * h));
        expect(f * (g + h) == f * g + f * h);
        expect((jet_partial(f * g, 0) - (jet_partial(f, 0) * g + f * jet_partial(g, 0)))
                   .truncated(N - 1)
                   .is_zero());

        FormJet u = random_one_form(rng, n, N), v = random_one_form(rng, n, N);
        expect(exterior_d(exterior_d(u)).all_zero());
        expect((exterior_d(wedge(u, v)) - (wedge(exterior_d(u), v) - wedge(u, exterior_d(v))))
                   .truncated(N - 1)
                   .all_zero());

        VectorFieldJet X = random_field(rng, n, N), Y = random_field(rng, n, N);
        FormJet cartan = lie_derivative(X, u) - exterior_d(interior_product(X, u)) -
                         interior_product(X, exterior_d(u));
        expect(cartan.truncated(N - 1).all_zero());

        FormalMap phi = random_tangent_map(rng, n, N);
        VectorFieldJet nat =
            pushforward(phi, lie_bracket(X, Y)) - lie_bracket(pushforward(phi, X), pushforward(phi, Y));
        expect(nat.truncated(N - 1).is_zero());
        expect((pullback(phi, wedge(u, v)) - wedge(pullback(phi, u), pullback(phi, v)))
                   .truncated(N - 1)
                   .all_zero());

        FormalMap psi = random_tangent_map(rng, n, N);
        expect((jet_compose(f, map_compose(phi, psi)) - jet_compose(jet_compose(f, phi), psi))
                   .truncated(N - 1)
                   .is_zero());
    }
    return checks_failed == 0 && checks_run >= 500;
}

// --- criterion 2: Poincare-Dulac certificates -----------------------------

VectorFieldJet random_pd_input(std::mt19937_64& rng, int n, int N) {
    std::uniform_int_distribution<int> diag(-4, 4);
    std::uniform_int_distribution<int> off(-2, 2);
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<int> coin(0, 3);
    Mat L(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), Scalar(0)));
    for (int i = 0; i < n; ++i) {
        L[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = Scalar(diag(rng));
        for (int j = i + 1; j < n; ++j)
            if (coin(rng) == 0) L[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Scalar(off(rng));
    }
    VectorFieldJet X = VectorFieldJet::linear(N, L);
    for (int i = 0; i < n; ++i)
        for (const Monomial& m : enumerate_monomials(n, 2, N))
            if (coin(rng) == 0) X.comp(i).add_term(m, Scalar(coeff(rng)));
    return X;
}

bool criterion2() {
    std::mt19937_64 rng(102);
    checks_run = checks_failed = 0;
    int certs = 0;
    for (int it = 0; it < 100; ++it) {
        int n = 2 + it % 3;
        int N = n == 2 ? 6 : n == 3 ? 5 : 4;
        VectorFieldJet X = random_pd_input(rng, n, N);
        PDResult r = pd_normalize(X, N);
        ++certs;
        expect(pushforward(r.Phi, X) == r.X_nf);
        expect(is_resonant_field(r.gamma, r.X_nf));
        expect(lie_bracket(VectorFieldJet::diagonal(N, r.gamma), r.X_nf).is_zero());
        ResonanceLattice lat = resonance_lattice(r.gamma, N);
        for (const auto& [m, i] : r.resonant_support) {
            bool found = false;
            for (const auto& [lm, li] : lat.vf_resonances)
                if (lm == m && li == i) found = true;
            expect(found);
        }
    }
    return checks_failed == 0 && certs >= 100;
}

// --- criterion 3: toric conservation law ----------------------------------

VectorFieldJet random_resonant_field(std::mt19937_64& rng, const std::vector<Scalar>& gamma, int N) {
    int n = static_cast<int>(gamma.size());
    ResonanceLattice lat = resonance_lattice(gamma, N - 1);
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<int> coin(0, 2);
    VectorFieldJet X = VectorFieldJet::diagonal(N, gamma);
    for (int i = 0; i < n; ++i)
        for (const Monomial& k : lat.kernel_monomials) {
            if (k.degree() == 0 || coin(rng) != 0) continue;
            Monomial m = k;
            m.e[static_cast<std::size_t>(i)] += 1;
            X.comp(i).add_term(m, Scalar(coeff(rng)));
        }
    return X;
}

// Divergence-free resonant field built from paired kernel-monomial terms.
VectorFieldJet random_divfree_field(std::mt19937_64& rng, const std::vector<Scalar>& gamma, int N) {
    int n = static_cast<int>(gamma.size());
    ResonanceLattice lat = resonance_lattice(gamma, N - 1);
    std::uniform_int_distribution<int> coeff(-2, 2);
    std::uniform_int_distribution<int> coin(0, 2);
    VectorFieldJet X = VectorFieldJet::diagonal(N, gamma);
    for (const Monomial& k : lat.kernel_monomials) {
        if (k.degree() == 0 || coin(rng) != 0) continue;
        int i = static_cast<int>(rng() % static_cast<unsigned long>(n));
        int j = (i + 1 + static_cast<int>(rng() % static_cast<unsigned long>(n - 1))) % n;
        Scalar r(coeff(rng));
        Monomial mi = k, mj = k;
        mi.e[static_cast<std::size_t>(i)] += 1;
        mj.e[static_cast<std::size_t>(j)] += 1;
        X.comp(i).add_term(mi, r * Scalar(static_cast<long>(k.e[static_cast<std::size_t>(j)]) + 1));
        X.comp(j).add_term(mj, -r * Scalar(static_cast<long>(k.e[static_cast<std::size_t>(i)]) + 1));
    }
    return X;
}

bool criterion3() {
    std::mt19937_64 rng(103);
    std::uniform_int_distribution<int> gpick(-3, 3);
    std::uniform_int_distribution<int> epick(0, 2);
    checks_run = checks_failed = 0;
    int done = 0;
    while (done < 50) { // invariant mode
        int n = 2 + static_cast<int>(rng() % 2), N = 5;
        std::vector<Scalar> gamma;
        Scalar tail(0);
        for (int i = 1; i < n; ++i) {
            Scalar g(gpick(rng));
            gamma.push_back(g);
            tail += g;
        }
        gamma.insert(gamma.begin(), Scalar(0) - tail);
        bool allzero = true;
        for (const Scalar& g : gamma) allzero = allzero && g.is_zero();
        if (allzero) continue;
        ++done;
        VectorFieldJet X = random_divfree_field(rng, gamma, N);
        FormJet vol(n, N, n);
        vol.add(full(n), Jet::one(n, N));
        RationalTensorJet Lam = make_rational(TensorValue{vol}, Jet::one(n, N));
        ToricAction act = toric_generators(gamma);
        ConservationReport rep = verify_conservation(X, Lam, act, ConservationMode::Invariant);
        expect(rep.hypothesis_ok);
        expect(rep.conserved);
        for (const auto& R : rep.residuals) expect(tensor_is_zero(R));
    }
    done = 0;
    while (done < 50) { // semi-invariant mode with monomial rational tensors
        int n = 2 + static_cast<int>(rng() % 2), N = 5;
        std::vector<Scalar> gamma;
        for (int i = 0; i < n; ++i) gamma.push_back(Scalar(gpick(rng)));
        VectorFieldJet X = random_resonant_field(rng, gamma, N);
        Monomial A(n), B(n);
        for (int i = 0; i < n; ++i) {
            A.e[static_cast<std::size_t>(i)] = static_cast<unsigned>(epick(rng));
            B.e[static_cast<std::size_t>(i)] = static_cast<unsigned>(epick(rng));
        }
        Jet num_coeff = Jet::term(n, N, A, Scalar(1));
        FormJet vol(n, N, n);
        vol.add(full(n), Jet::one(n, N));
        TensorValue Om = (done % 2 == 0) ? TensorValue{num_coeff * vol} : TensorValue{[&] {
            MultiVectorJet mv(n, N, n);
            mv.add(full(n), num_coeff);
            return mv;
        }()};
        RationalTensorJet Lam{Om, Jet::term(n, N, B, Scalar(1)), false};
        ToricAction act = toric_generators(gamma);
        ConservationReport rep = verify_conservation(X, Lam, act, ConservationMode::SemiInvariant);
        expect(rep.hypothesis_ok);
        expect(rep.conserved);
        ++done;
    }
    return checks_failed == 0;
}

// --- criteria 4/5 helpers: geometric round trips --------------------------

VectorFieldJet resonant_divisor_field(std::mt19937_64& rng, const std::vector<Scalar>& gamma, int N) {
    int n = static_cast<int>(gamma.size());
    VectorFieldJet X = VectorFieldJet::diagonal(N, gamma);
    ResonanceLattice lat = resonance_lattice(gamma, N);
    std::uniform_int_distribution<int> coeff(-2, 2);
    std::uniform_int_distribution<int> coin(0, 1);
    for (const auto& [m, i] : lat.vf_resonances) {
        if (i == 0 || m.e[static_cast<std::size_t>(i)] != 0) continue;
        if (coin(rng) == 0) continue;
        X.comp(i).add_term(m, Scalar(coeff(rng)));
    }
    return X;
}

NormalizationCertificate folded_trip(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> gpick(-3, 3);
    int n = 2 + static_cast<int>(rng() % 2), N = 5;
    std::vector<Scalar> gamma;
    Scalar tail(0);
    for (int i = 1; i < n; ++i) {
        Scalar g(2 * gpick(rng));
        gamma.push_back(g);
        tail += g;
    }
    gamma.insert(gamma.begin(), Scalar(0) - tail / Scalar(2));
    VectorFieldJet Xnf = resonant_divisor_field(rng, gamma, N);
    FormJet model = folded_volume_model(n, N);
    FormalMap psi = random_tangent_map(rng, n, N);
    return simul_normalize_folded_volume(pushforward(psi, Xnf), transport(psi, model), N);
}

NormalizationCertificate log_nambu_trip(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> gpick(-3, 3);
    int n = 2 + static_cast<int>(rng() % 2), N = 5;
    std::vector<Scalar> gamma{Scalar(gpick(rng))};
    Scalar tail(0);
    for (int i = 1; i < n - 1; ++i) {
        Scalar g(gpick(rng));
        gamma.push_back(g);
        tail += g;
    }
    gamma.push_back(Scalar(0) - tail);
    VectorFieldJet Xnf = resonant_divisor_field(rng, gamma, N);
    MultiVectorJet model = log_nambu_model(n, N);
    FormalMap psi = random_tangent_map(rng, n, N);
    return simul_normalize_log_nambu(pushforward(psi, Xnf), pushforward(psi, model), N);
}

bool criterion4() {
    std::mt19937_64 rng(104);
    checks_run = checks_failed = 0;
    for (int it = 0; it < 50; ++it) {
        NormalizationCertificate cert = folded_trip(rng);
        expect(cert.valid());
        Scalar rel = cert.gamma[0];
        for (const Scalar& g : cert.gamma) rel += g;
        expect(rel.is_zero());
    }
    for (int it = 0; it < 50; ++it) {
        NormalizationCertificate cert = log_nambu_trip(rng);
        expect(cert.valid());
        Scalar rel(0);
        for (std::size_t i = 1; i < cert.gamma.size(); ++i) rel += cert.gamma[i];
        expect(rel.is_zero());
    }
    return checks_failed == 0;
}

NormalizationCertificate multifolded_trip(std::mt19937_64& rng, int m) {
    std::uniform_int_distribution<int> gpick(1, 3);
    std::uniform_int_distribution<int> cpick(-2, 2);
    int n2 = 4, N = 5;
    FormJet om = multifolded_model(n2, m, N);
    VectorFieldJet Y(n2, N);
    std::vector<Scalar> diag;
    if (m == 1) {
        // Symmetry from F = x1^2 G(y) + K(y): Y = 2G d2 - (x1^2 G_2 + K_2) d3 + (x1^2 G_1 + K_1) d4.
        Jet G(n2, N), K(n2, N);
        for (const Monomial& mm : enumerate_monomials(n2, 2, 3)) {
            if (mm.e[0] != 0 || mm.e[1] != 0) continue;
            if (rng() % 2 == 0) G.add_term(mm, Scalar(cpick(rng)));
        }
        for (const Monomial& mm : enumerate_monomials(n2, 3, 4)) {
            if (mm.e[0] != 0 || mm.e[1] != 0) continue;
            if (rng() % 2 == 0) K.add_term(mm, Scalar(cpick(rng)));
        }
        Jet x1sq = jx(n2, N, 0) * jx(n2, N, 0);
        Y.comp(1) = Scalar(2) * G;
        Y.comp(2) = -(x1sq * jet_partial(G, 3) + jet_partial(K, 3));
        Y.comp(3) = x1sq * jet_partial(G, 2) + jet_partial(K, 2);
        Scalar a(gpick(rng)), c(gpick(rng));
        diag = {a, Scalar(-2) * a, c, Scalar(0) - c};
    } else {
        // Symmetry from F(x1^2, x2^2): Y = (F_1 / x1) d3 + (F_2 / x2) d4.
        Scalar c1(cpick(rng)), c2(cpick(rng)), c3(cpick(rng));
        Jet x1sq = jx(n2, N, 0) * jx(n2, N, 0), x2sq = jx(n2, N, 1) * jx(n2, N, 1);
        Y.comp(2) = Scalar(4) * c1 * x1sq + Scalar(2) * c2 * x2sq;
        Y.comp(3) = Scalar(2) * c2 * x1sq + Scalar(4) * c3 * x2sq;
        Scalar a1(gpick(rng)), a2(-gpick(rng));
        diag = {a1, a2, Scalar(-2) * a1, Scalar(-2) * a2};
    }
    VectorFieldJet S = VectorFieldJet::diagonal(N, diag);
    FormalMap psi = time1_flow(Y);
    return simul_normalize_multifolded(pushforward(psi, S), transport(psi, om), N);
}

// e^{ad_Y} X computed as a bracket series; exact on jets since Y raises degree.
VectorFieldJet ad_exp(const VectorFieldJet& Y, const VectorFieldJet& X0, int N) {
    VectorFieldJet acc = X0, term = X0;
    for (int r = 1; r <= N; ++r) {
        term = lie_bracket(Y, term);
        for (int i = 0; i < term.nvars; ++i) term.comp(i) = Scalar(1, r) * term.comp(i);
        if (term.is_zero()) break;
        acc = acc + term;
    }
    return acc;
}

NormalizationCertificate log_symplectic_trip(std::mt19937_64& rng, int k) {
    std::uniform_int_distribution<int> gpick(1, 3);
    std::uniform_int_distribution<int> cpick(-2, 2);
    int n = k == 1 ? 2 : 4, N = 5;
    LogFormJet om = log_symplectic_model(n, k, N);
    VectorFieldJet XL(n, N);
    for (int j = 0; j < k; ++j) XL.comp(2 * j) = Scalar(gpick(rng)) * jx(n, N, 2 * j);
    // Conjugate by the time-1 flow of the log-Hamiltonian field of a random F,
    // a symmetry of the model, so the structure is carried along unchanged.
    Jet F(n, N);
    for (const Monomial& m : enumerate_monomials(n, 3, 4))
        if (rng() % 3 == 0) F.add_term(m, Scalar(cpick(rng)));
    VectorFieldJet Y(n, N);
    for (int j = 0; j < k; ++j) {
        Y.comp(2 * j) = jx(n, N, 2 * j) * jet_partial(F, 2 * j + 1);
        Y.comp(2 * j + 1) = -(jx(n, N, 2 * j) * jet_partial(F, 2 * j));
    }
    for (int j = 2 * k; j < n; j += 2) {
        Y.comp(j) = jet_partial(F, j + 1);
        Y.comp(j + 1) = -jet_partial(F, j);
    }
    return simul_normalize_log_symplectic(ad_exp(Y, XL, N), om, N);
}

// Contact helpers (theta is variable 0; the slice carries the pairing dx_j ^ dx_{n+j}).

Jet extend_jet(const Jet& f) {
    int nv = f.nvars(), tr = f.trunc();
    Jet r(nv + 1, tr);
    for (const auto& [m, c] : f.terms()) {
        Monomial mm(nv + 1);
        for (int j = 0; j < nv; ++j) mm.e[static_cast<std::size_t>(j + 1)] = m.e[static_cast<std::size_t>(j)];
        r.add_term(mm, c);
    }
    return r;
}

VectorFieldJet extend_field(const VectorFieldJet& X) {
    VectorFieldJet r(X.nvars + 1, X.trunc);
    for (int i = 0; i < X.nvars; ++i) r.comp(i + 1) = extend_jet(X.comp(i));
    return r;
}

FormalMap extend_map(const FormalMap& psi) {
    int nv = psi.nvars(), tr = psi.trunc();
    FormalMap r(nv + 1, tr);
    r.comp(0) = Jet::variable(nv + 1, tr, 0);
    for (int i = 0; i < nv; ++i) r.comp(i + 1) = extend_jet(psi.comp(i));
    return r;
}

VectorFieldJet slice_hamiltonian(const Jet& H) {
    int n2 = H.nvars(), n = n2 / 2, tr = H.trunc();
    VectorFieldJet X(n2, tr);
    for (int j = 0; j < n; ++j) {
        X.comp(j) = -jet_partial(H, n + j);
        X.comp(n + j) = jet_partial(H, j);
    }
    return X;
}

std::vector<Scalar> lambda_hat(const std::vector<Scalar>& lambda) {
    std::vector<Scalar> lh = lambda;
    for (const Scalar& l : lambda) lh.push_back(Scalar(1) - l);
    return lh;
}

Jet random_invariant_hamiltonian(std::mt19937_64& rng, const std::vector<Scalar>& lambda,
                                 const std::vector<Scalar>& gamma_x, int N, bool fix_divisor) {
    int n2 = static_cast<int>(gamma_x.size()), n = n2 / 2;
    std::vector<Scalar> lh = lambda_hat(lambda);
    std::uniform_int_distribution<int> coeff(-2, 2);
    std::uniform_int_distribution<int> coin(0, 1);
    Jet H(n2, N);
    for (const Monomial& m : enumerate_monomials(n2, 3, N)) {
        if (monomial_pairing(m, lh) != Scalar(1)) continue;
        if (!monomial_pairing(m, gamma_x).is_zero()) continue;
        if (fix_divisor && m.e[static_cast<std::size_t>(n)] != 0) continue;
        if (coin(rng) == 0) continue;
        H.add_term(m, Scalar(coeff(rng)));
    }
    return H;
}

NormalizationCertificate transversal_trip(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> gpick(1, 3);
    int n = 2, N = 5, n2 = 2 * n;
    std::vector<Scalar> lam{Scalar(1, 3), Scalar(2, 5)};
    Scalar a1(gpick(rng)), a2(-gpick(rng));
    std::vector<Scalar> gx{a1, a2, Scalar(0) - a1, Scalar(0) - a2};
    VectorFieldJet Xnf = VectorFieldJet::diagonal(N, gx) +
                         slice_hamiltonian(random_invariant_hamiltonian(rng, lam, gx, N, false));
    SingularContactJet model = transversal_contact_model(n, lam, N);
    FormalMap psi = extend_map(random_tangent_map(rng, n2, N));
    SingularContactJet data{n, ContactKind::Transversal, 0, transport(psi, model.alpha)};
    return simul_normalize_transversal_contact(pushforward(psi, extend_field(Xnf)), data, N);
}

NormalizationCertificate tangential_trip(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> gpick(1, 3);
    int n = 2, N = 5, n2 = 2 * n;
    std::vector<Scalar> lam{Scalar(1, 3), Scalar(1, 4)};
    Scalar b(gpick(rng));
    std::vector<Scalar> gx{Scalar(0), b, Scalar(0), Scalar(0) - b};
    VectorFieldJet Xnf = VectorFieldJet::diagonal(N, gx) +
                         slice_hamiltonian(random_invariant_hamiltonian(rng, lam, gx, N, true));
    SingularContactJet model = tangential_contact_model(n, 3, lam, N);
    FormalMap psi = extend_map(random_tangent_map(rng, n2, N));
    SingularContactJet data{n, ContactKind::Tangential, 3, transport(psi, model.alpha)};
    return simul_normalize_tangential_contact(pushforward(psi, extend_field(Xnf)), data, N);
}

bool criterion5() {
    checks_run = checks_failed = 0;
    {
        std::mt19937_64 rng(105);
        for (int it = 0; it < 25; ++it) expect(folded_trip(rng).valid());
    }
    {
        std::mt19937_64 rng(106);
        for (int it = 0; it < 25; ++it) expect(log_nambu_trip(rng).valid());
    }
    for (int m = 1; m <= 2; ++m) {
        std::mt19937_64 rng(107 + static_cast<unsigned>(m));
        for (int it = 0; it < 25; ++it) expect(multifolded_trip(rng, m).valid());
    }
    for (int k = 1; k <= 2; ++k) {
        std::mt19937_64 rng(109 + static_cast<unsigned>(k));
        for (int it = 0; it < 25; ++it) expect(log_symplectic_trip(rng, k).valid());
    }
    {
        std::mt19937_64 rng(111);
        for (int it = 0; it < 25; ++it) expect(transversal_trip(rng).valid());
    }
    {
        std::mt19937_64 rng(112);
        for (int it = 0; it < 25; ++it) expect(tangential_trip(rng).valid());
    }
    return checks_failed == 0;
}

// --- criterion 6: worked fixtures -----------------------------------------

bool criterion6() {
    checks_run = checks_failed = 0;
    {
        int n = 2, N = 6;
        FormJet Om = top_form(jx(n, N, 0) + jx(n, N, 0) * jx(n, N, 0));
        FormalMap Phi = canon_folded_volume(Om, N);
        Jet expected =
            jx(n, N, 0) * unit_function(Jet::one(n, N) + Scalar(2, 3) * jx(n, N, 0), UnitKind::Sqrt);
        expect(Phi.comp(0) == expected);
        expect(pullback(Phi, folded_volume_model(n, N)) == Om);
    }
    {
        int n = 2, N = 10;
        LogFormJet om({0}, n, N, 2);
        FormJet dy(n, N, 1);
        dy.add({1}, Jet::one(n, N));
        om.log_parts.at(0) = dy;
        om.regular.add({0, 1}, Jet::one(n, N));
        FormalMap Phi = canon_log_symplectic(om, std::nullopt, N);
        expect(Phi.comp(0) == jx(n, N, 0) * unit_function(jx(n, N, 0), UnitKind::Exp));
        LogFormJet res = log_transport(Phi, om) - log_symplectic_model(n, 1, N);
        res.canonicalize();
        expect(res.regular.truncated(8).all_zero());
        for (const auto& [i, b] : res.log_parts) expect(b.truncated(8).all_zero());
    }
    for (int n = 1; n <= 3; ++n)
        for (int m = 1; m <= n; ++m) {
            int n2 = 2 * n, N = 5;
            FormJet om = multifolded_model(n2, m, N);
            std::vector<Scalar> weights(static_cast<std::size_t>(n2), Scalar(3));
            for (int i = 0; i < 2 * m; ++i) weights[static_cast<std::size_t>(i)] = Scalar(2);
            VectorFieldJet E = VectorFieldJet::diagonal(N, weights);
            expect(lie_derivative(E, om) == Scalar(6) * om);
        }
    return checks_failed == 0;
}

// --- criterion 7: contact structural lemmas -------------------------------

bool criterion7() {
    std::mt19937_64 rng(113);
    std::uniform_int_distribution<int> coeff(-2, 2);
    std::uniform_int_distribution<int> coin(0, 1);
    checks_run = checks_failed = 0;
    {
        int n = 2, N = 6;
        std::vector<Scalar> lam{Scalar(1, 3), Scalar(1, 3)};
        SingularContactJet a = transversal_contact_model(n, lam, N);
        std::vector<Scalar> lh = lambda_hat(lam);
        int done = 0;
        while (done < 50) {
            Jet H(2 * n, N);
            for (const Monomial& m : enumerate_monomials(2 * n, 1, N))
                if (monomial_pairing(m, lh) == Scalar(1) && coin(rng) == 0) H.add_term(m, Scalar(coeff(rng)));
            if (H.is_zero()) continue;
            ++done;
            ContactPreservationReport rep =
                verify_contact_preservation(extend_field(slice_hamiltonian(H)), a);
            expect(rep.preserved);
            expect(rep.f0_zero);
            expect(rep.theta_independent);
        }
    }
    {
        int n = 2, N = 5;
        std::vector<Scalar> lam{Scalar(1, 3), Scalar(1, 4)};
        SingularContactJet a = tangential_contact_model(n, 3, lam, N);
        std::uniform_int_distribution<int> gpick(1, 3);
        int done = 0;
        while (done < 50) {
            Scalar b(gpick(rng));
            std::vector<Scalar> gx{Scalar(0), b, Scalar(0), Scalar(0) - b};
            VectorFieldJet Xnf = VectorFieldJet::diagonal(N, gx) +
                                 slice_hamiltonian(random_invariant_hamiltonian(rng, lam, gx, N, true));
            ++done;
            ContactPreservationReport rep = verify_contact_preservation(extend_field(Xnf), a);
            expect(rep.preserved);
            expect(rep.f0_zero);
            expect(rep.f1_zero);
        }
    }
    {
        int n = 2, N = 6, nv = 2 * n + 1;
        std::vector<Scalar> lam{Scalar(1), Scalar(1)};
        SingularContactJet a = transversal_contact_model(n, lam, N);
        std::vector<Scalar> lh = lambda_hat(lam);
        int done = 0;
        while (done < 25) {
            Jet H(2 * n, N);
            for (const Monomial& m : enumerate_monomials(2 * n, 1, N))
                if (monomial_pairing(m, lh) == Scalar(1) && coin(rng) == 0) H.add_term(m, Scalar(coeff(rng)));
            if (H.is_zero()) continue;
            ++done;
            HamiltonianReport hr = extract_hamiltonian(extend_field(slice_hamiltonian(H)), a);
            expect(hr.H == extend_jet(H));
            (void)nv;
        }
    }
    return checks_failed == 0;
}

// --- criterion 8: determinism ---------------------------------------------

std::string folded_cert_bytes() {
    int n = 3, N = 5;
    std::mt19937_64 rng(114);
    std::vector<Scalar> gamma{Scalar(1), Scalar(-3), Scalar(1)};
    VectorFieldJet Xnf = resonant_divisor_field(rng, gamma, N);
    FormalMap psi = random_tangent_map(rng, n, N);
    NormalizationCertificate cert =
        simul_normalize_folded_volume(pushforward(psi, Xnf), transport(psi, folded_volume_model(n, N)), N);
    return render_certificate(to_json(cert));
}

std::string pd_cert_bytes() {
    std::mt19937_64 rng(115);
    VectorFieldJet X = random_pd_input(rng, 3, 5);
    return render_certificate(to_json(pd_normalize(X, 5)));
}

bool criterion8() {
    checks_run = checks_failed = 0;
    expect(folded_cert_bytes() == folded_cert_bytes());
    expect(pd_cert_bytes() == pd_cert_bytes());
    return checks_failed == 0;
}

struct Criterion {
    const char* label;
    bool (*run)();
};

} // namespace

int main() {
    const Criterion table[] = {
        {"criterion 1: jet-algebra invariant suites (>= 500 randomized instances)", criterion1},
        {"criterion 2: Poincare-Dulac certificates (100 random fields, n <= 4)", criterion2},
        {"criterion 3: toric conservation law (100 randomized systems)", criterion3},
        {"criterion 4: resonance relations on 50 + 50 round trips", criterion4},
        {"criterion 5: simultaneous-normalization round trips (25 per structure kind)", criterion5},
        {"criterion 6: worked fixtures with independent oracles", criterion6},
        {"criterion 7: contact structural lemmas (50 + 50 fields, 25 Hamiltonian trips)", criterion7},
        {"criterion 8: byte-identical certificates across repeated runs", criterion8},
    };
    int failures = 0;
    for (const Criterion& c : table) {
        bool ok = false;
        std::string note;
        try {
            ok = c.run();
            if (!ok)
                note = " (" + std::to_string(checks_failed) + "/" + std::to_string(checks_run) +
                       " checks failed)";
        } catch (const Error& e) {
            note = std::string(" (") + e.what() + ")";
        }
        std::printf("%s %s%s\n", ok ? "PASS" : "FAIL", c.label, note.c_str());
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
