#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nfkit/contact.hpp"
#include "nfkit/error.hpp"

using namespace nfkit;

namespace {

Jet jx(int n, int N, int i) { return Jet::variable(n, N, i); }

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

// Hamiltonian field of H on the slice for the pairing dx_j ^ dx_{n+j}.
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

// Random Hamiltonian on the slice with weight-one monomials in the kernel of
// the dynamics pairing; fix_divisor additionally avoids the conjugate of x_1.
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

FormalMap random_tangent_map(std::mt19937_64& rng, int n, int N) {
    std::uniform_int_distribution<int> coeff(-2, 2);
    std::uniform_int_distribution<int> coin(0, 3);
    FormalMap phi = FormalMap::identity(n, N);
    for (int i = 0; i < n; ++i)
        for (const Monomial& m : enumerate_monomials(n, 2, std::min(N, 3)))
            if (coin(rng) == 0) phi.comp(i).add_term(m, Scalar(coeff(rng)));
    return phi;
}

FormJet slice_gamma(const SingularContactJet& a) {
    int n2 = 2 * a.n, tr = a.trunc();
    FormJet g(n2, tr, 1);
    for (int i = 1; i <= n2; ++i) {
        Jet c = a.alpha.comp({i});
        Jet r(n2, tr);
        for (const auto& [m, cc] : c.terms()) {
            if (m.e[0] != 0) continue;
            Monomial mm(n2);
            for (int j = 1; j <= n2; ++j) mm.e[static_cast<std::size_t>(j - 1)] = m.e[static_cast<std::size_t>(j)];
            r.add_term(mm, cc);
        }
        if (!r.is_zero()) g.add({i - 1}, r);
    }
    g.prune();
    return g;
}

} // namespace

TEST_CASE("contact models and the preservation lemma") {
    int n = 2, N = 6;
    std::vector<Scalar> lam{Scalar(1, 3), Scalar(1, 3)};
    SingularContactJet a = transversal_contact_model(n, lam, N);
    CHECK(a.alpha.comp({0}) == jx(2 * n + 1, N, 0));

    // Every preserving field has no theta component and theta-free
    // coefficients; witnessed on random preserving fields.
    std::mt19937_64 rng(91);
    std::uniform_int_distribution<int> coeff(-2, 2);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<Scalar> lh = lambda_hat(lam);
    int done = 0;
    while (done < 50) {
        Jet H(2 * n, N);
        for (const Monomial& m : enumerate_monomials(2 * n, 1, N))
            if (monomial_pairing(m, lh) == Scalar(1) && coin(rng) == 0) H.add_term(m, Scalar(coeff(rng)));
        if (H.is_zero()) continue;
        ++done;
        VectorFieldJet X = extend_field(slice_hamiltonian(H));
        ContactPreservationReport rep = verify_contact_preservation(X, a);
        CHECK(rep.preserved);
        CHECK(rep.f0_zero);
        CHECK(rep.theta_independent);
    }

    // A field that moves theta is flagged and does not preserve.
    VectorFieldJet Xbad(2 * n + 1, N);
    Xbad.comp(0) = jx(2 * n + 1, N, 1);
    ContactPreservationReport rep = verify_contact_preservation(Xbad, a);
    CHECK_FALSE(rep.preserved);
    CHECK_FALSE(rep.f0_zero);
}

TEST_CASE("extract hamiltonian") {
    int n = 2, N = 6, nv = 2 * n + 1;
    SingularContactJet anv = nonvanishing_contact_model(n, N);
    // H = x2 x3; the field -x2 d1 + x3 d4 preserves the chart form.
    Jet H(2 * n, N);
    H.add_term({0, 1, 1, 0}, Scalar(1));
    VectorFieldJet X = extend_field(slice_hamiltonian(H));
    HamiltonianReport hr = extract_hamiltonian(X, anv);
    CHECK(hr.H == jx(nv, N, 2) * jx(nv, N, 3));
    CHECK(hr.independent_x1);
    CHECK(hr.degree_relation);

    // Transversal chart with lambda = (1, 1) carries H = x2 x3 + x2 x4^2.
    std::vector<Scalar> lam{Scalar(1), Scalar(1)};
    SingularContactJet at = transversal_contact_model(n, lam, N);
    Jet H2 = H + Jet::term(2 * n, N, {0, 1, 0, 2}, Scalar(1));
    VectorFieldJet X2 = extend_field(slice_hamiltonian(H2));
    HamiltonianReport hr2 = extract_hamiltonian(X2, at);
    CHECK(hr2.H == extend_jet(H2));
    CHECK(hr2.independent_x1);
    CHECK(hr2.degree_relation);

    // Non-preserving input and tangential charts are rejected.
    VectorFieldJet Xbad(nv, N);
    Xbad.comp(1) = jx(nv, N, 1);
    CHECK_THROWS_AS(extract_hamiltonian(Xbad, anv), Error);
    SingularContactJet atan = tangential_contact_model(1, 3, {Scalar(1, 3)}, N);
    VectorFieldJet Z0(3, N);
    CHECK_THROWS_AS(extract_hamiltonian(Z0, atan), Error);
}

TEST_CASE("scaling field of the transversal model") {
    int n = 2, N = 5, nv = 2 * n + 1;
    std::vector<Scalar> lam{Scalar(1, 3), Scalar(2, 5)};
    SingularContactJet a = transversal_contact_model(n, lam, N);
    VectorFieldJet Z1(nv, N);
    Z1.comp(0) = Scalar(1, 2) * jx(nv, N, 0);
    for (int j = 0; j < n; ++j) {
        Z1.comp(1 + j) = lam[static_cast<std::size_t>(j)] * jx(nv, N, 1 + j);
        Z1.comp(1 + n + j) = (Scalar(1) - lam[static_cast<std::size_t>(j)]) * jx(nv, N, 1 + n + j);
    }
    CHECK(lie_derivative(Z1, a.alpha) == a.alpha);
}

TEST_CASE("transversal fixture") {
    int n = 1, N = 6, nv = 3;
    SingularContactJet a = transversal_contact_model(n, {Scalar(1, 3)}, N);
    VectorFieldJet X(nv, N);
    X.comp(1) = -jx(nv, N, 1);
    X.comp(2) = jx(nv, N, 2);
    NormalizationCertificate cert = simul_normalize_transversal_contact(X, a, N);
    CHECK(cert.valid());
    CHECK(cert.X_nf == X);
    CHECK(cert.Phi == FormalMap::identity(nv, N));
    CHECK(std::get<FormJet>(cert.structure_nf) == a.alpha);
    REQUIRE(cert.resonance.values.size() == 1);
    CHECK(cert.resonance.values[0].is_zero());
    CHECK(cert.gamma == std::vector<Scalar>{Scalar(0), Scalar(-1), Scalar(1)});
    // theta and x1 x2 are first integrals of the normalized dynamics.
    CHECK(cert.X_nf.comp(0).is_zero());
    CHECK(cert.X_nf.apply(jx(nv, N, 1) * jx(nv, N, 2)).is_zero());

    // Error paths: wrong kind, non-preserving field, nonvanishing constant term.
    SingularContactJet atan = tangential_contact_model(1, 3, {Scalar(1, 3)}, N);
    CHECK_THROWS_AS(simul_normalize_transversal_contact(X, atan, N), Error);
    VectorFieldJet Xb = X;
    Xb.comp(1) += jx(nv, N, 2) * jx(nv, N, 2);
    CHECK_THROWS_AS(simul_normalize_transversal_contact(Xb, a, N), Error);
    VectorFieldJet Xc = X;
    Xc.comp(2) += Jet::one(nv, N);
    CHECK_THROWS_AS(simul_normalize_transversal_contact(Xc, a, N), Error);
}

TEST_CASE("transversal round trips") {
    std::mt19937_64 rng(92);
    std::uniform_int_distribution<int> gpick(1, 3);
    int n = 2, N = 5, n2 = 2 * n;
    std::vector<Scalar> lam{Scalar(1, 3), Scalar(2, 5)};
    for (int done = 0; done < 6; ++done) {
        Scalar a1(gpick(rng)), a2(-gpick(rng));
        std::vector<Scalar> gx{a1, a2, -a1, -a2};
        VectorFieldJet Xnf = VectorFieldJet::diagonal(N, gx) +
                             slice_hamiltonian(random_invariant_hamiltonian(rng, lam, gx, N, false));
        SingularContactJet model = transversal_contact_model(n, lam, N);
        REQUIRE(lie_derivative(extend_field(Xnf), model.alpha).all_zero());
        FormalMap psi = extend_map(random_tangent_map(rng, n2, N));
        SingularContactJet data{n, ContactKind::Transversal, 0, transport(psi, model.alpha)};
        VectorFieldJet X = pushforward(psi, extend_field(Xnf));
        NormalizationCertificate cert = simul_normalize_transversal_contact(X, data, N);
        CHECK(cert.valid());
        CHECK(pushforward(cert.Phi, X) == cert.X_nf);
        CHECK((transport(cert.Phi, data.alpha) - std::get<FormJet>(cert.structure_nf))
                  .truncated(N - 1)
                  .all_zero());
    }
}

TEST_CASE("tangential fixture and round trips") {
    int n = 1, N = 6, nv = 3;
    SingularContactJet a = tangential_contact_model(n, 3, {Scalar(1, 3)}, N);
    // X = 3 x1^2 d2 keeps theta and x1 fixed and preserves the form.
    VectorFieldJet X(nv, N);
    X.comp(2) = Scalar(3) * jx(nv, N, 1) * jx(nv, N, 1);
    ContactPreservationReport rep = verify_contact_preservation(X, a);
    CHECK(rep.preserved);
    CHECK(rep.f1_zero);
    NormalizationCertificate cert = simul_normalize_tangential_contact(X, a, N);
    CHECK(cert.valid());
    CHECK(cert.X_nf == X);
    CHECK(std::get<FormJet>(cert.structure_nf) == a.alpha);

    // A field moving the tangency divisor is structurally broken.
    VectorFieldJet Xb = X;
    Xb.comp(1) = jx(nv, N, 2) * jx(nv, N, 2);
    CHECK_THROWS_WITH_AS(simul_normalize_tangential_contact(Xb, a, N),
                         "TangentialStructureBroken: field moves the tangency divisor", Error);

    std::mt19937_64 rng(93);
    std::uniform_int_distribution<int> gpick(1, 3);
    int m = 2, N2 = 5, m2 = 2 * m;
    std::vector<Scalar> lam{Scalar(1, 3), Scalar(1, 4)};
    for (int done = 0; done < 6; ++done) {
        Scalar b(gpick(rng));
        std::vector<Scalar> gx{Scalar(0), b, Scalar(0), -b};
        VectorFieldJet Xnf = VectorFieldJet::diagonal(N2, gx) +
                             slice_hamiltonian(random_invariant_hamiltonian(rng, lam, gx, N2, true));
        SingularContactJet model = tangential_contact_model(m, 3, lam, N2);
        REQUIRE(lie_derivative(extend_field(Xnf), model.alpha).all_zero());
        FormalMap psi = extend_map(random_tangent_map(rng, m2, N2));
        SingularContactJet data{m, ContactKind::Tangential, 3, transport(psi, model.alpha)};
        VectorFieldJet Xd = pushforward(psi, extend_field(Xnf));
        NormalizationCertificate cert2 = simul_normalize_tangential_contact(Xd, data, N2);
        CHECK(cert2.valid());
        CHECK((transport(cert2.Phi, data.alpha) - std::get<FormJet>(cert2.structure_nf))
                  .truncated(N2 - 1)
                  .all_zero());
    }
}

TEST_CASE("primitive form recognizer") {
    int N = 6;
    // Pure semisimple part: one block per eigenvalue, Q = 0, R = 0.
    std::vector<Scalar> lam{Scalar(1, 3), Scalar(2, 5)};
    SingularContactJet a = transversal_contact_model(2, lam, N);
    PrimitiveFormReport rep = check_primitive_normal_form(slice_gamma(a), lam);
    CHECK(rep.matches_normal_form);
    REQUIRE(rep.blocks.size() == 2);
    CHECK(rep.blocks[0].q_case == 0);
    CHECK(rep.blocks[1].size == 1);
    CHECK(rep.residual_R_support.empty());

    // Jordan chain inside a lambda = 1/3 block of size two.
    std::vector<Scalar> lam2{Scalar(1, 3), Scalar(1, 3)};
    FormJet g2 = slice_gamma(transversal_contact_model(2, lam2, N));
    Jet Q = jx(4, N, 1) * jx(4, N, 2);
    FormJet gc = g2 + exterior_d(Q);
    PrimitiveFormReport rep2 = check_primitive_normal_form(gc, lam2);
    CHECK(rep2.matches_normal_form);
    REQUIRE(rep2.blocks.size() == 1);
    CHECK(rep2.blocks[0].size == 2);
    CHECK(rep2.blocks[0].q_case == 1);

    // lambda = 1/2 square, and a weight-one cubic residual.
    std::vector<Scalar> lamh{Scalar(1, 2)};
    FormJet gh = slice_gamma(transversal_contact_model(1, lamh, N));
    PrimitiveFormReport rep3 = check_primitive_normal_form(gh + exterior_d(jx(2, N, 1) * jx(2, N, 1)), lamh);
    CHECK(rep3.blocks[0].q_case == 2);
    std::vector<Scalar> lam3{Scalar(1, 3)};
    FormJet g3 = slice_gamma(transversal_contact_model(1, lam3, N));
    Jet R = jx(2, N, 0) * jx(2, N, 0) * jx(2, N, 0);
    PrimitiveFormReport rep4 = check_primitive_normal_form(g3 + exterior_d(R), lam3);
    CHECK(rep4.matches_normal_form);
    REQUIRE(rep4.residual_R_support.size() == 1);
    CHECK(rep4.residual_R_support[0].second == Scalar(1));

    // Off-resonance residual and unlisted quadratic parts are rejected.
    Jet Rbad = jx(2, N, 0) * jx(2, N, 0) * jx(2, N, 0) * jx(2, N, 0);
    CHECK_THROWS_AS(check_primitive_normal_form(g3 + exterior_d(Rbad), lam3), Error);
    CHECK_THROWS_AS(check_primitive_normal_form(g3 + exterior_d(jx(2, N, 0) * jx(2, N, 0)), lam3), Error);
}
