#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nfkit/error.hpp"
#include "nfkit/tensor.hpp"
#include "nfkit/tpoly.hpp"

using namespace nfkit;

namespace {

Jet random_jet(std::mt19937_64& rng, int n, int N, int max_terms = 6) {
    Jet j(n, N);
    std::uniform_int_distribution<int> nterms(0, max_terms);
    std::uniform_int_distribution<int> coeff(-5, 5);
    std::uniform_int_distribution<int> expo(0, N);
    int k = nterms(rng);
    for (int t = 0; t < k; ++t) {
        Monomial m(n);
        int budget = expo(rng);
        for (int v = 0; v < n && budget > 0; ++v) {
            std::uniform_int_distribution<int> pick(0, budget);
            int e = pick(rng);
            m.e[static_cast<std::size_t>(v)] = static_cast<unsigned>(e);
            budget -= e;
        }
        j.add_term(m, Scalar::of(coeff(rng), coeff(rng)));
    }
    return j;
}

VectorFieldJet random_field(std::mt19937_64& rng, int n, int N) {
    VectorFieldJet X(n, N);
    for (int i = 0; i < n; ++i) X.comp(i) = random_jet(rng, n, N);
    return X;
}

FormJet random_form(std::mt19937_64& rng, int n, int N, int k) {
    FormJet w(n, N, k);
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::uniform_int_distribution<int> var(0, n - 1);
    for (int t = 0; t < 4; ++t) {
        for (auto& i : idx) i = var(rng);
        w.add(idx, random_jet(rng, n, N));
    }
    return w;
}

MultiVectorJet random_mv(std::mt19937_64& rng, int n, int N, int k) {
    MultiVectorJet w(n, N, k);
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::uniform_int_distribution<int> var(0, n - 1);
    for (int t = 0; t < 4; ++t) {
        for (auto& i : idx) i = var(rng);
        w.add(idx, random_jet(rng, n, N));
    }
    return w;
}

FormalMap random_invertible_map(std::mt19937_64& rng, int n, int N) {
    std::uniform_int_distribution<int> coeff(-3, 3);
    for (;;) {
        std::vector<Jet> comps;
        for (int r = 0; r < n; ++r) {
            Jet c = random_jet(rng, n, N);
            c.set(Monomial(n), Scalar(0));
            Monomial m(n);
            m.e[static_cast<std::size_t>(r)] = 1;
            c.add_term(m, Scalar(1 + std::abs(coeff(rng))));
            comps.push_back(c);
        }
        FormalMap phi{comps};
        try {
            (void)map_inverse(phi);
            return phi;
        } catch (const Error&) {
            continue;
        }
    }
}

Jet jx(int n, int N, int i) { return Jet::variable(n, N, i); }

} // namespace

TEST_CASE("wedge antisymmetry and fixtures") {
    int n = 2, N = 3;
    FormJet dx1 = form_dx(n, N, 0), dx2 = form_dx(n, N, 1);
    CHECK(wedge(dx1, dx2) == -wedge(dx2, dx1));
    CHECK(wedge(dx1, dx1).all_zero());

    FormJet a = jx(n, N, 0) * dx1 + jx(n, N, 1) * dx2;
    // (x1 dx1 + x2 dx2) ^ dx1 = -x2 dx1^dx2.
    FormJet expect(n, N, 2);
    expect.add({0, 1}, -jx(n, N, 1));
    CHECK(wedge(a, dx1) == expect);
}

TEST_CASE("exterior derivative fixtures and d^2 = 0") {
    int n = 3, N = 4;
    // d(x1 x2 dx1) = x1 dx2^dx1 = -x1 dx1^dx2.
    FormJet w(n, N, 1);
    w.add({0}, jx(n, N, 0) * jx(n, N, 1));
    FormJet expect(n, N, 2);
    expect.add({0, 1}, -jx(n, N, 0));
    CHECK(exterior_d(w) == expect);

    std::mt19937_64 rng(11);
    for (int t = 0; t < 30; ++t) {
        FormJet r = random_form(rng, n, N, 1);
        CHECK(exterior_d(exterior_d(r)).all_zero());
        CHECK(exterior_d(exterior_d(random_jet(rng, n, N))).all_zero());
    }
}

TEST_CASE("interior product fixture and nilpotency") {
    int n = 2, N = 3;
    VectorFieldJet X(n, N);
    X.comp(0) = jx(n, N, 1);
    X.comp(1) = -jx(n, N, 0);
    FormJet vol = wedge(form_dx(n, N, 0), form_dx(n, N, 1));
    // i_{x2 d1 - x1 d2}(dx1^dx2) = x2 dx2 + x1 dx1.
    FormJet expect(n, N, 1);
    expect.add({1}, jx(n, N, 1));
    expect.add({0}, jx(n, N, 0));
    CHECK(interior_product(X, vol) == expect);

    std::mt19937_64 rng(12);
    for (int t = 0; t < 30; ++t) {
        VectorFieldJet Y = random_field(rng, 3, 3);
        FormJet w = random_form(rng, 3, 3, 2);
        CHECK(interior_product(Y, interior_product(Y, w)).all_zero());
    }
}

TEST_CASE("lie bracket fixture and jacobi identity") {
    int n = 2, N = 4;
    VectorFieldJet X(n, N), Y(n, N);
    X.comp(1) = jx(n, N, 0); // x1 d2
    Y.comp(0) = jx(n, N, 1); // x2 d1
    VectorFieldJet expect(n, N);
    expect.comp(0) = jx(n, N, 0);
    expect.comp(1) = -jx(n, N, 1);
    CHECK(lie_bracket(X, Y) == expect);

    std::mt19937_64 rng(13);
    for (int t = 0; t < 25; ++t) {
        VectorFieldJet A = random_field(rng, 2, 3), B = random_field(rng, 2, 3), C = random_field(rng, 2, 3);
        VectorFieldJet jac = lie_bracket(A, lie_bracket(B, C)) + lie_bracket(B, lie_bracket(C, A)) +
                             lie_bracket(C, lie_bracket(A, B));
        // Truncation cuts both nestings the same way only below top degree.
        CHECK(jac.truncated(2).is_zero());
    }
}

TEST_CASE("cartan calculus properties") {
    std::mt19937_64 rng(14);
    int n = 3, N = 3;
    for (int t = 0; t < 25; ++t) {
        VectorFieldJet X = random_field(rng, n, N);
        VectorFieldJet Y = random_field(rng, n, N);
        FormJet w = random_form(rng, n, N, 1);
        // L_X w = d i_X w + i_X d w is the definition; cross-check naturality
        // facts below truncation-sensitive degrees.
        FormJet lhs = lie_derivative(X, exterior_d(w));
        FormJet rhs = exterior_d(lie_derivative(X, w));
        CHECK(lhs.truncated(1) == rhs.truncated(1));

        FormJet a = random_form(rng, n, N, 1), b = random_form(rng, n, N, 1);
        FormJet leib = lie_derivative(X, wedge(a, b)) - wedge(lie_derivative(X, a), b) - wedge(a, lie_derivative(X, b));
        CHECK(leib.truncated(2).all_zero());

        FormJet w2 = random_form(rng, n, N, 2);
        FormJet comm = lie_derivative(X, interior_product(Y, w2)) - interior_product(Y, lie_derivative(X, w2)) -
                       interior_product(lie_bracket(X, Y), w2);
        CHECK(comm.truncated(2).all_zero());

        MultiVectorJet V = random_mv(rng, n, N, 1);
        MultiVectorJet lv = lie_derivative(X, V);
        VectorFieldJet br = lie_bracket(X, field_from_mv(V));
        CHECK(field_from_mv(lv) == br);
    }
}

TEST_CASE("pullback fixtures and functoriality") {
    int n = 2, N = 4;
    std::vector<Jet> comps{jx(n, N, 0) + jx(n, N, 0) * jx(n, N, 0), jx(n, N, 1)};
    FormalMap phi{comps};
    FormJet vol = wedge(form_dx(n, N, 0), form_dx(n, N, 1));
    // phi = (x1 + x1^2, x2): phi^*(dx1^dx2) = (1 + 2 x1) dx1^dx2.
    FormJet expect(n, N, 2);
    expect.add({0, 1}, Jet::one(n, N) + Scalar(2) * jx(n, N, 0));
    CHECK(pullback(phi, vol) == expect);

    std::mt19937_64 rng(15);
    for (int t = 0; t < 25; ++t) {
        FormalMap f = random_invertible_map(rng, 2, 3);
        FormalMap g = random_invertible_map(rng, 2, 3);
        FormJet w = random_form(rng, 2, 3, 1);
        FormJet once = pullback(map_compose(f, g), w);
        FormJet twice = pullback(g, pullback(f, w));
        CHECK(once.truncated(2) == twice.truncated(2));

        FormJet nat = pullback(f, exterior_d(w)) - exterior_d(pullback(f, w));
        CHECK(nat.truncated(1).all_zero());
    }
}

TEST_CASE("pushforward inverts pullback and respects contraction") {
    std::mt19937_64 rng(16);
    int n = 2, N = 3;
    for (int t = 0; t < 25; ++t) {
        FormalMap phi = random_invertible_map(rng, n, N);
        VectorFieldJet X = random_field(rng, n, N);
        FormJet w = random_form(rng, n, N, 1);
        FormJet moved = transport(phi, w);
        CHECK(pullback(map_inverse(phi), w).truncated(2) == moved.truncated(2));

        VectorFieldJet Xm = pushforward(phi, X);
        FormJet lhs = interior_product(Xm, moved);
        FormJet rhs = transport(phi, interior_product(X, w));
        CHECK(lhs.truncated(2) == rhs.truncated(2));

        VectorFieldJet Y = random_field(rng, n, N);
        VectorFieldJet br = pushforward(phi, lie_bracket(X, Y));
        VectorFieldJet br2 = lie_bracket(pushforward(phi, X), pushforward(phi, Y));
        CHECK(br.truncated(2) == br2.truncated(2));

        MultiVectorJet W = random_mv(rng, n, N, 2);
        MultiVectorJet back = pushforward(map_inverse(phi), pushforward(phi, W));
        CHECK(back.truncated(2) == W.truncated(2));
    }
}

TEST_CASE("poincare primitive") {
    int n = 2, N = 4;
    FormJet vol = wedge(form_dx(n, N, 0), form_dx(n, N, 1));
    FormJet eta = poincare_primitive(vol);
    // (x1 dx2 - x2 dx1)/2.
    FormJet expect(n, N, 1);
    expect.add({1}, Scalar(1, 2) * jx(n, N, 0));
    expect.add({0}, Scalar(-1, 2) * jx(n, N, 1));
    CHECK(eta == expect);
    CHECK(exterior_d(eta) == vol);

    FormJet bad(3, N, 2);
    bad.add({0, 1}, jx(3, N, 2));
    CHECK_THROWS_WITH_AS(poincare_primitive(bad), "NotClosed: form is not closed", Error);

    std::mt19937_64 rng(17);
    for (int t = 0; t < 20; ++t) {
        Jet f = random_jet(rng, 3, 4);
        FormJet df = exterior_d(f);
        FormJet back = poincare_primitive(df);
        Jet delta = f - back.comp({});
        // Primitive agrees with f up to the constant term.
        delta.set(Monomial(3), Scalar(0));
        CHECK(delta.is_zero());
    }
}

TEST_CASE("euler weight fixture") {
    int n = 2, N = 4;
    // E = 2 x1 d1 + 4 x2 d2 gives L_E(dx1^dx2) = 6 dx1^dx2.
    VectorFieldJet E(n, N);
    E.comp(0) = Scalar(2) * jx(n, N, 0);
    E.comp(1) = Scalar(4) * jx(n, N, 1);
    FormJet vol = wedge(form_dx(n, N, 0), form_dx(n, N, 1));
    CHECK(lie_derivative(E, vol) == Scalar(6) * vol);
}

TEST_CASE("time-1 flows") {
    int N = 3;
    // x' = x^2: time-1 map x -> x + x^2 + x^3 + ...
    VectorFieldJet X(1, N);
    X.comp(0) = jx(1, N, 0) * jx(1, N, 0);
    FormalMap phi = time1_flow(X);
    Jet expect = jx(1, N, 0) + jx(1, N, 0) * jx(1, N, 0) +
                 jx(1, N, 0) * jx(1, N, 0) * jx(1, N, 0);
    CHECK(phi.comp(0) == expect);

    // x' = t x^2: x(1) = x/(1 - x/2) = x + x^2/2 + x^3/4 + ...
    TFieldJet Xt(1, N);
    Xt.comp(0) = TJet::t_term(1, jx(1, N, 0) * jx(1, N, 0));
    FormalMap psi = time1_flow(Xt);
    Jet expect2 = jx(1, N, 0) + Scalar(1, 2) * (jx(1, N, 0) * jx(1, N, 0)) +
                  Scalar(1, 4) * (jx(1, N, 0) * jx(1, N, 0) * jx(1, N, 0));
    CHECK(psi.comp(0) == expect2);

    VectorFieldJet lin(1, N);
    lin.comp(0) = jx(1, N, 0);
    CHECK_THROWS_AS(time1_flow(lin), Error);

    std::mt19937_64 rng(18);
    for (int t = 0; t < 20; ++t) {
        int n = 2;
        VectorFieldJet Y(n, 4);
        for (int i = 0; i < n; ++i) {
            Jet c = random_jet(rng, n, 4);
            c = c - c.truncated(1); // order >= 2
            Y.comp(i) = c;
        }
        FormalMap fwd = time1_flow(Y);
        FormalMap bwd = time1_flow(-Y);
        CHECK(map_compose(fwd, bwd) == FormalMap::identity(n, 4));
        // The flow preserves its own autonomous generator.
        CHECK(pushforward(fwd, Y) == Y);
    }
}

TEST_CASE("t-jet arithmetic and reciprocal") {
    int n = 1, N = 4;
    TJet q = TJet::from_jet(Jet::one(n, N)) + TJet::t_term(1, jx(n, N, 0));
    TJet r = tjet_reciprocal(q);
    CHECK((q * r) == TJet::from_jet(Jet::one(n, N)));
    CHECK(q.at(Scalar(1)) == Jet::one(n, N) + jx(n, N, 0));
    CHECK(q.integrate_t().coeff(2) == Scalar(1, 2) * jx(n, N, 0));

    TJet bad = TJet::t_term(1, Jet::one(n, N));
    CHECK_THROWS_AS(tjet_reciprocal(bad), Error);
}

TEST_CASE("log form calculus") {
    int n = 2, N = 4;
    // w = dx1/x1 ^ dx2.
    LogFormJet w({0}, n, N, 2);
    w.log_parts.at(0) = form_dx(n, N, 1);
    CHECK(log_exterior_d(w).all_zero());

    VectorFieldJet X1(n, N);
    X1.comp(0) = jx(n, N, 0);
    LogFormJet c1 = log_interior_product(X1, w); // x1 d1 : gives dx2
    LogFormJet expect1({0}, n, N, 1);
    expect1.regular = form_dx(n, N, 1);
    CHECK(c1 == expect1);

    VectorFieldJet X2(n, N);
    X2.comp(1) = Jet::one(n, N);
    LogFormJet c2 = log_interior_product(X2, w); // d2 : gives -dx1/x1
    LogFormJet expect2({0}, n, N, 1);
    expect2.log_parts.at(0) = -FormJet(n, N, 0);
    expect2.log_parts.at(0).add({}, -Jet::one(n, N));
    CHECK(c2 == expect2);

    VectorFieldJet bad(n, N);
    bad.comp(0) = Jet::one(n, N);
    CHECK_THROWS_AS(log_interior_product(bad, w), Error);
    CHECK(!log_tangent(bad, {0}));
    CHECK(log_tangent(X1, {0}));

    // Canonicalization: dx1/x1 ^ (x1 dx2) is regular.
    LogFormJet mixed({0}, n, N, 2);
    mixed.log_parts.at(0) = jx(n, N, 0) * form_dx(n, N, 1);
    mixed.canonicalize();
    CHECK(mixed.log_parts.at(0).all_zero());
    FormJet reg(n, N, 2);
    reg.add({0, 1}, Jet::one(n, N));
    CHECK(mixed.regular == reg);
}

TEST_CASE("log pullback") {
    int n = 2, N = 4;
    LogFormJet w({0}, n, N, 2);
    w.log_parts.at(0) = form_dx(n, N, 1);

    // phi = (x1 (1 + x2), x2): phi^* w = (dx1/x1 + d(1+x2)/(1+x2)) ^ dx2 = w.
    std::vector<Jet> comps{jx(n, N, 0) * (Jet::one(n, N) + jx(n, N, 1)), jx(n, N, 1)};
    FormalMap phi{comps};
    CHECK(log_pullback(phi, w) == w);

    // Coordinate swap permutes the divisor.
    std::vector<Jet> sw{jx(n, N, 1), jx(n, N, 0)};
    FormalMap swap_map{sw};
    LogFormJet moved = log_pullback(swap_map, w);
    LogFormJet expect({1}, n, N, 2);
    expect.log_parts.at(1) = form_dx(n, N, 0);
    CHECK(moved == expect);

    // x1 -> x1 + x2^2 tears the divisor apart.
    std::vector<Jet> tear{jx(n, N, 0) + jx(n, N, 1) * jx(n, N, 1), jx(n, N, 1)};
    FormalMap bad{tear};
    CHECK_THROWS_WITH_AS(log_pullback(bad, w), "DivisorNotPreserved: map does not preserve the log divisor",
                         Error);

    // Round-trip along a random divisor-preserving map.
    std::mt19937_64 rng(19);
    for (int t = 0; t < 15; ++t) {
        Jet u = Jet::one(n, N) + random_jet(rng, n, N).truncated(2) * jx(n, N, 1);
        std::vector<Jet> mc{jx(n, N, 0) * u, jx(n, N, 1) + jx(n, N, 1) * jx(n, N, 1)};
        FormalMap m{mc};
        LogFormJet back = log_pullback(map_inverse(m), log_pullback(m, w));
        LogFormJet diff = back - w;
        diff.canonicalize();
        // The inverse map's unit factor is known one degree short, and its
        // logarithmic differential one more; compare below that.
        bool small = true;
        for (auto& [i, beta] : diff.log_parts)
            if (!beta.truncated(N - 2).all_zero()) small = false;
        if (!diff.regular.truncated(N - 2).all_zero()) small = false;
        CHECK(small);
    }
}

TEST_CASE("log gram matrix and pfaffian") {
    int n = 4, N = 3;
    // w0 = dx1/x1 ^ dx3 + dx2/x2 ^ dx4.
    LogFormJet w({0, 1}, n, N, 2);
    w.log_parts.at(0) = form_dx(n, N, 2);
    w.log_parts.at(1) = form_dx(n, N, 3);
    auto B = log_gram(w);
    CHECK(B[0][2] == Jet::one(n, N));
    CHECK(B[2][0] == -Jet::one(n, N));
    CHECK(B[1][3] == Jet::one(n, N));
    // Pf = b01 b23 - b02 b13 + b03 b12 = -1.
    CHECK(pfaffian(B) == -Jet::one(n, N));

    // Regular symplectic pair contributes through the x-scalings.
    LogFormJet wr({0}, n, N, 2);
    wr.log_parts.at(0) = form_dx(n, N, 1);
    auto B2 = log_gram(wr);
    CHECK(B2[0][1] == Jet::one(n, N));
    CHECK(pfaffian(B2).is_zero()); // degenerate in 4 variables
}
