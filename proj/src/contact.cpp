#include "nfkit/contact.hpp"

#include <algorithm>

#include "nfkit/error.hpp"

namespace nfkit {

namespace {

Monomial unit_mono(int n, int i) {
    Monomial m(n);
    m.e[static_cast<std::size_t>(i)] = 1;
    return m;
}

Jet drop_variable(const Jet& f, int v) {
    Jet r(f.nvars(), f.trunc());
    for (const auto& [m, c] : f.terms())
        if (m.e[static_cast<std::size_t>(v)] == 0) r.add_term(m, c);
    return r;
}

bool theta_free(const Jet& f) { return f == drop_variable(f, 0); }

// Variable 0 is theta; restriction/extension shift the x-indices by one.
Jet restrict_jet(const Jet& f) {
    int nv = f.nvars(), tr = f.trunc();
    Jet r(nv - 1, tr);
    for (const auto& [m, c] : f.terms()) {
        if (m.e[0] != 0) continue;
        Monomial mm(nv - 1);
        for (int j = 1; j < nv; ++j) mm.e[static_cast<std::size_t>(j - 1)] = m.e[static_cast<std::size_t>(j)];
        r.add_term(mm, c);
    }
    return r;
}

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

VectorFieldJet restrict_field(const VectorFieldJet& X) {
    VectorFieldJet r(X.nvars - 1, X.trunc);
    for (int i = 1; i < X.nvars; ++i) r.comp(i - 1) = restrict_jet(X.comp(i));
    return r;
}

VectorFieldJet extend_field(const VectorFieldJet& X) {
    VectorFieldJet r(X.nvars + 1, X.trunc);
    for (int i = 0; i < X.nvars; ++i) r.comp(i + 1) = extend_jet(X.comp(i));
    return r;
}

FormJet extend_form(const FormJet& w) {
    FormJet r(w.nvars() + 1, w.trunc(), w.degree());
    for (const auto& [idx, c] : w.comps()) {
        IndexTuple jdx = idx;
        for (int& j : jdx) ++j;
        r.set_sorted(jdx, extend_jet(c));
    }
    return r;
}

FormalMap extend_map(const FormalMap& psi) {
    int nv = psi.nvars(), tr = psi.trunc();
    FormalMap r(nv + 1, tr);
    r.comp(0) = Jet::variable(nv + 1, tr, 0);
    for (int i = 0; i < nv; ++i) r.comp(i + 1) = extend_jet(psi.comp(i));
    return r;
}

Mat constant_gram(const FormJet& w) {
    int n = w.nvars();
    Mat A = mat_zero(n, n);
    for (const auto& [idx, c] : w.comps()) {
        Scalar v = c.constant_term();
        if (v.is_zero()) continue;
        A[static_cast<std::size_t>(idx[0])][static_cast<std::size_t>(idx[1])] = v;
        A[static_cast<std::size_t>(idx[1])][static_cast<std::size_t>(idx[0])] = -v;
    }
    return A;
}

Mat canonical_symplectic(int r2) {
    Mat J = mat_zero(r2, r2);
    int r = r2 / 2;
    for (int j = 0; j < r; ++j) {
        J[static_cast<std::size_t>(j)][static_cast<std::size_t>(j + r)] = Scalar(1);
        J[static_cast<std::size_t>(j + r)][static_cast<std::size_t>(j)] = Scalar(-1);
    }
    return J;
}

FormJet canonical_symplectic_form(int n2, int tr) {
    FormJet w(n2, tr, 2);
    int r = n2 / 2;
    for (int j = 0; j < r; ++j) w.add({j, j + r}, Jet::one(n2, tr));
    return w;
}

// Radial homotopy primitive, dF = xi for closed xi without constant part.
Jet primitive_function(const FormJet& xi) {
    int n = xi.nvars(), N = xi.trunc();
    Jet F(n, N);
    for (const auto& [idx, c] : xi.comps()) {
        int j = idx[0];
        for (const auto& [m, coef] : c.terms()) {
            Monomial mm = m;
            mm.e[static_cast<std::size_t>(j)] += 1;
            if (mm.degree() <= N) F.add_term(mm, coef / Scalar(m.degree() + 1));
        }
    }
    return F;
}

std::vector<Scalar> diagonal_eigenvalues(const VectorFieldJet& X) {
    Mat L = X.linear_part();
    int n = X.nvars;
    std::vector<Scalar> gamma;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (i != j && !L[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_zero())
                fail(ErrorCode::HypothesisFailed, "normalized field does not have a diagonal linear part");
        gamma.push_back(L[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
    }
    return gamma;
}

VectorFieldJet project_field_weight_zero(const VectorFieldJet& X, const ToricAction& act) {
    VectorFieldJet r(X.nvars, X.trunc);
    for (int i = 0; i < X.nvars; ++i) {
        Jet kept(X.nvars, X.trunc);
        for (const auto& [m, c] : X.comp(i).terms()) {
            bool zero = true;
            for (const auto& zrow : act.Z)
                if (monomial_weight(m, zrow) != zrow[static_cast<std::size_t>(i)]) zero = false;
            if (zero) kept.add_term(m, c);
        }
        r.comp(i) = kept;
    }
    return r;
}

// Z with i_Z(om) = gamma, solved against the constant gram of om.
VectorFieldJet associated_field(const FormJet& gamma, const FormJet& om) {
    int n2 = gamma.nvars(), tr = gamma.trunc();
    Mat B0 = constant_gram(om);
    auto B0i = mat_inverse(B0);
    if (!B0i) fail(ErrorCode::DegenerateSymplecticForm, "primitive part has a degenerate differential");
    VectorFieldJet Z(n2, tr);
    for (int it = 0; it <= tr + 2; ++it) {
        FormJet res = gamma - interior_product(Z, om);
        if (res.all_zero()) return Z;
        std::vector<Jet> r(static_cast<std::size_t>(n2), Jet(n2, tr));
        for (const auto& [idx, c] : res.comps()) r[static_cast<std::size_t>(idx[0])] = c;
        for (int j = 0; j < n2; ++j) {
            Jet corr(n2, tr);
            for (int q = 0; q < n2; ++q)
                corr += (*B0i)[static_cast<std::size_t>(q)][static_cast<std::size_t>(j)] *
                        r[static_cast<std::size_t>(q)];
            Z.comp(j) += corr;
        }
    }
    fail(ErrorCode::Internal, "associated field iteration did not converge");
}

struct ContactSplit {
    FormJet gamma; // primitive part on the 2n slice variables
    Jet f;         // tangency divisor on the slice; zero unless Tangential
};

ContactSplit split_contact(const SingularContactJet& a) {
    int nv = a.nvars(), tr = a.trunc();
    if (a.n < 1 || a.alpha.nvars() != nv || a.alpha.degree() != 1)
        fail(ErrorCode::DimensionMismatch, "contact data has inconsistent dimensions");
    Jet c0 = a.alpha.comp({0});
    Jet fhat(nv, tr);
    if (a.kind == ContactKind::Tangential) {
        if (a.m <= 2) fail(ErrorCode::HypothesisFailed, "tangency order must exceed 2");
        if (a.m - 1 > tr) fail(ErrorCode::DimensionMismatch, "tangency order exceeds the truncation");
        Monomial tp(nv);
        tp.e[0] = static_cast<unsigned>(a.m - 1);
        fhat = Jet::term(nv, tr, tp, Scalar(a.m)) - c0;
        if (!theta_free(fhat))
            fail(ErrorCode::HypothesisFailed, "contact form is not of the declared tangential shape");
        if (!fhat.constant_term().is_zero())
            fail(ErrorCode::HypothesisFailed, "tangency divisor does not pass through the origin");
        bool lin = false;
        for (int i = 1; i < nv; ++i)
            if (!fhat.coeff(unit_mono(nv, i)).is_zero()) lin = true;
        if (!lin) fail(ErrorCode::HypothesisFailed, "tangency divisor is degenerate at the origin");
    } else {
        if (c0 != Jet::variable(nv, tr, 0))
            fail(ErrorCode::HypothesisFailed, "contact form is not of the declared shape");
    }
    FormJet gamma(nv - 1, tr, 1);
    for (int i = 1; i < nv; ++i) {
        Jet ci = a.alpha.comp({i});
        Jet g = drop_variable(ci, 0);
        Jet rest = ci - g;
        if (a.kind == ContactKind::Tangential) {
            if (rest != -(Jet::variable(nv, tr, 0) * jet_partial(fhat, i)))
                fail(ErrorCode::HypothesisFailed, "contact form is not of the declared tangential shape");
        } else if (!rest.is_zero()) {
            fail(ErrorCode::HypothesisFailed, "primitive part depends on the distinguished coordinate");
        }
        if (a.kind != ContactKind::NonVanishing && !g.constant_term().is_zero())
            fail(ErrorCode::HypothesisFailed, "primitive part must vanish at the origin");
        if (!g.is_zero()) gamma.add({i - 1}, restrict_jet(g));
    }
    gamma.prune();
    return {gamma, restrict_jet(fhat)};
}

} // namespace

SingularContactJet nonvanishing_contact_model(int n, int trunc) {
    int nv = 2 * n + 1;
    FormJet a(nv, trunc, 1);
    a.add({0}, Jet::variable(nv, trunc, 0));
    a.add({n + 1}, Jet::variable(nv, trunc, 1) + Jet::one(nv, trunc));
    for (int k = 2; k <= n; ++k) a.add({n + k}, Jet::variable(nv, trunc, k));
    return {n, ContactKind::NonVanishing, 0, a};
}

SingularContactJet transversal_contact_model(int n, const std::vector<Scalar>& lambda, int trunc) {
    if (static_cast<int>(lambda.size()) != n)
        fail(ErrorCode::DimensionMismatch, "one eigenvalue per symplectic pair is required");
    int nv = 2 * n + 1;
    FormJet a(nv, trunc, 1);
    a.add({0}, Jet::variable(nv, trunc, 0));
    for (int j = 0; j < n; ++j) {
        const Scalar& l = lambda[static_cast<std::size_t>(j)];
        a.add({n + 1 + j}, l * Jet::variable(nv, trunc, 1 + j));
        a.add({1 + j}, (l - Scalar(1)) * Jet::variable(nv, trunc, n + 1 + j));
    }
    a.prune();
    return {n, ContactKind::Transversal, 0, a};
}

SingularContactJet tangential_contact_model(int n, int m, const std::vector<Scalar>& lambda, int trunc) {
    if (m <= 2) fail(ErrorCode::HypothesisFailed, "tangency order must exceed 2");
    if (m - 1 > trunc) fail(ErrorCode::DimensionMismatch, "tangency order exceeds the truncation");
    SingularContactJet a = transversal_contact_model(n, lambda, trunc);
    a.kind = ContactKind::Tangential;
    a.m = m;
    int nv = a.nvars();
    Monomial tp(nv);
    tp.e[0] = static_cast<unsigned>(m - 1);
    FormJet al = a.alpha;
    al.add({0}, Jet::term(nv, trunc, tp, Scalar(m)) - Jet::variable(nv, trunc, 1) -
                    Jet::variable(nv, trunc, 0));
    al.add({1}, -Jet::variable(nv, trunc, 0));
    al.prune();
    a.alpha = al;
    return a;
}

ContactPreservationReport verify_contact_preservation(const VectorFieldJet& X, const SingularContactJet& alpha) {
    int nv = alpha.nvars(), tr = alpha.trunc();
    if (X.nvars != nv || X.trunc != tr)
        fail(ErrorCode::DimensionMismatch, "field and contact form do not match");
    ContactPreservationReport rep{false, lie_derivative(X, alpha.alpha).truncated(tr - 1), false, false, true};
    rep.preserved = rep.residual.all_zero();
    rep.f0_zero = X.comp(0).is_zero();
    rep.theta_independent = true;
    for (int i = 0; i < nv; ++i)
        if (!theta_free(X.comp(i))) rep.theta_independent = false;
    if (alpha.kind == ContactKind::Tangential) {
        ContactSplit sp = split_contact(alpha);
        rep.f1_zero = X.apply(extend_jet(sp.f)).truncated(tr - 1).is_zero();
    }
    return rep;
}

HamiltonianReport extract_hamiltonian(const VectorFieldJet& X, const SingularContactJet& alpha) {
    int nv = alpha.nvars(), tr = alpha.trunc(), n = alpha.n;
    if (alpha.kind == ContactKind::Tangential)
        fail(ErrorCode::HypothesisFailed, "tangential forms have no Hamiltonian chart equation");
    ContactPreservationReport rep = verify_contact_preservation(X, alpha);
    if (!rep.preserved) fail(ErrorCode::PreservationFailed, "field does not preserve the contact form");
    FormJet ip = interior_product(X, alpha.alpha);
    Jet H = ip.comp(IndexTuple{});
    VectorFieldJet Za(nv, tr);
    if (alpha.kind == ContactKind::NonVanishing) {
        Za.comp(1) = Jet::variable(nv, tr, 1) + Jet::one(nv, tr);
        for (int i = 2; i <= n; ++i) Za.comp(i) = Jet::variable(nv, tr, i);
    } else {
        ContactSplit sp = split_contact(alpha);
        Za = extend_field(associated_field(sp.gamma, exterior_d(sp.gamma)));
    }
    if (Za.apply(H) != H)
        fail(ErrorCode::StructuralPropertyViolated, "Hamiltonian is not an eigenfunction of the associated field");
    HamiltonianReport out{H, true, true};
    for (const auto& [m, c] : H.terms()) {
        if (m.e[1] != 0) out.independent_x1 = false;
        unsigned s = 0;
        for (int i = 2; i <= n; ++i) s += m.e[static_cast<std::size_t>(i)];
        if (s != 1) out.degree_relation = false;
    }
    return out;
}

namespace {

// Shared slice pipeline: straighten the field and the primitive part on
// {theta = 0}. Returns the slice chart, the normalized field and primitive
// part, and the eigenvalue data of the dynamics and the associated field.
struct SlicePipeline {
    FormalMap Psi;
    VectorFieldJet X_nf;
    FormJet gamma_nf;
    std::vector<Scalar> gamma_X;
    std::vector<Scalar> lambda_Z;
};

SlicePipeline slice_normalize(const VectorFieldJet& X2, const FormJet& gamma2, int N) {
    int n2 = gamma2.nvars(), tr = gamma2.trunc();
    FormJet om = exterior_d(gamma2);
    VectorFieldJet Z = associated_field(gamma2, om);
    if (!lie_bracket(Z, X2).truncated(tr - 1).is_zero())
        fail(ErrorCode::CommutationFailed, "field does not commute with the associated field");
    PDResult pdZ = pd_normalize(Z, N);
    VectorFieldJet X2a = project_field_weight_zero(pushforward(pdZ.Phi, X2), pdZ.torus);
    PDResult pdX = equivariant_pd_normalize(X2a, pdZ.torus, N);
    FormalMap Psi = map_compose(pdX.Phi, pdZ.Phi);
    FormJet g = transport(Psi, gamma2);
    // Linear Darboux for the constant part of d(gamma).
    Mat A0 = constant_gram(exterior_d(g));
    if (A0 != canonical_symplectic(n2)) {
        auto P = symplectic_gram_schmidt(A0);
        if (!P) fail(ErrorCode::DegenerateSymplecticForm, "primitive part has a degenerate differential");
        auto Pinv = mat_inverse(*P);
        if (!Pinv) fail(ErrorCode::Internal, "singular Darboux change");
        FormalMap M = FormalMap::linear(tr, *Pinv);
        Psi = map_compose(M, Psi);
        g = transport(M, g);
    }
    // Moser step down to the constant symplectic form, with the generator kept
    // weight-zero for the joint torus of the dynamics and the associated field.
    FormJet omc = exterior_d(g);
    FormJet w0 = canonical_symplectic_form(n2, tr);
    std::vector<std::vector<long>> rows;
    auto add_rows = [&](const VectorFieldJet& F) {
        Mat L = F.linear_part();
        for (int i = 0; i < n2; ++i)
            for (int j = 0; j < n2; ++j)
                if (i != j && !L[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_zero()) return;
        std::vector<Scalar> d;
        for (int i = 0; i < n2; ++i) d.push_back(L[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
        for (const auto& zrow : toric_generators(d).Z) rows.push_back(zrow);
    };
    add_rows(pushforward(Psi, X2));
    add_rows(pushforward(Psi, Z));
    if ((omc - w0).truncated(tr - 1).all_zero() == false) {
        std::optional<ToricAction> W;
        if (!rows.empty()) W = ToricAction{static_cast<int>(rows.size()), {}, rows};
        LogFormJet G0({}, n2, tr, 2);
        G0.regular = w0;
        LogFormJet G1({}, n2, tr, 2);
        G1.regular = omc;
        FormalMap M = moser_path_solve(StructureValue{G0}, StructureValue{G1},
                                       {StructureTag::LogSymplectic, 0}, W, N);
        Psi = map_compose(M, Psi);
        g = transport(M, g);
    }
    SlicePipeline out{Psi, pushforward(Psi, X2), g, {}, {}};
    out.gamma_X = diagonal_eigenvalues(out.X_nf);
    out.lambda_Z = diagonal_eigenvalues(associated_field(g, exterior_d(g)));
    return out;
}

NormalizationCertificate contact_certificate(const SlicePipeline& sl, const SingularContactJet& alpha,
                                             const Jet& f_nf) {
    int n = alpha.n, nv = alpha.nvars(), tr = alpha.trunc(), n2 = 2 * n;
    std::vector<Scalar> gamma;
    gamma.push_back(Scalar(0));
    for (const Scalar& c : sl.gamma_X) gamma.push_back(c);
    VectorFieldJet Xn = extend_field(sl.X_nf);
    FormJet ghat = extend_form(sl.gamma_nf);
    FormJet alpha_nf(nv, tr, 1);
    Jet theta = Jet::variable(nv, tr, 0);
    if (alpha.kind == ContactKind::Transversal) {
        alpha_nf.add({0}, theta);
    } else {
        Monomial tp(nv);
        tp.e[0] = static_cast<unsigned>(alpha.m - 1);
        Jet fh = extend_jet(f_nf);
        alpha_nf.add({0}, Jet::term(nv, tr, tp, Scalar(alpha.m)) - fh);
        for (int i = 1; i < nv; ++i) {
            Jet d = jet_partial(fh, i);
            if (!d.is_zero()) alpha_nf.add({i}, -(theta * d));
        }
    }
    for (const auto& [idx, c] : ghat.comps()) alpha_nf.add(idx, c);
    alpha_nf.prune();
    // Residual of d(gamma_nf) against the constant symplectic form; one degree
    // is spent on the transport, one more on the differential.
    FormJet sres = extend_form((exterior_d(sl.gamma_nf) - canonical_symplectic_form(n2, tr)).truncated(tr - 2));
    NormalizationCertificate cert{extend_map(sl.Psi),
                                  Xn,
                                  StructureValue{alpha_nf},
                                  StructureValue{sres},
                                  lie_bracket(VectorFieldJet::diagonal(tr, gamma), Xn),
                                  gamma,
                                  toric_generators(gamma),
                                  {}};
    cert.resonance.ok = true;
    for (int j = 0; j < n; ++j) {
        Scalar rel = sl.lambda_Z[static_cast<std::size_t>(j)] + sl.lambda_Z[static_cast<std::size_t>(n + j)] -
                     Scalar(1);
        cert.resonance.values.push_back(rel);
        if (!rel.is_zero()) cert.resonance.ok = false;
    }
    std::vector<Scalar> lam(sl.lambda_Z.begin(), sl.lambda_Z.begin() + n);
    FormJet gcut = sl.gamma_nf.truncated(tr - 1);
    try {
        PrimitiveFormReport pf = check_primitive_normal_form(gcut, lam);
        if (!pf.matches_normal_form) cert.resonance.ok = false;
    } catch (const Error&) {
        cert.resonance.ok = false;
    }
    // The quadratic and higher primitives are first integrals of the
    // semisimple dynamics.
    FormJet gs(n2, tr, 1);
    for (int j = 0; j < n; ++j) {
        gs.add({n + j}, lam[static_cast<std::size_t>(j)] * Jet::variable(n2, tr, j));
        gs.add({j}, (lam[static_cast<std::size_t>(j)] - Scalar(1)) * Jet::variable(n2, tr, n + j));
    }
    Jet S = primitive_function(gcut - gs);
    VectorFieldJet Xs = VectorFieldJet::diagonal(tr, sl.gamma_X);
    if (!Xs.apply(S).is_zero()) cert.resonance.ok = false;
    if (alpha.kind == ContactKind::Tangential) {
        bool lin = false;
        for (int i = 0; i < n2; ++i)
            if (!f_nf.coeff(unit_mono(n2, i)).is_zero()) lin = true;
        if (!lin) cert.resonance.ok = false;
        if (!sl.X_nf.apply(f_nf).truncated(tr - 1).is_zero()) cert.resonance.ok = false;
    }
    return cert;
}

} // namespace

NormalizationCertificate simul_normalize_transversal_contact(const VectorFieldJet& X,
                                                             const SingularContactJet& alpha, int N) {
    int nv = alpha.nvars(), tr = alpha.trunc();
    if (alpha.kind != ContactKind::Transversal)
        fail(ErrorCode::HypothesisFailed, "contact form is not of transversal kind");
    if (X.nvars != nv || X.trunc != tr || N > tr)
        fail(ErrorCode::DimensionMismatch, "field and contact form do not match");
    ContactPreservationReport rep = verify_contact_preservation(X, alpha);
    if (!rep.preserved) fail(ErrorCode::PreservationFailed, "field does not preserve the contact form");
    if (!rep.f0_zero || !rep.theta_independent)
        fail(ErrorCode::StructuralPropertyViolated, "preserving field must be basic over the slice");
    if (!X.vanishes_at_origin()) fail(ErrorCode::ConstantTermNonzero, "field must vanish at the origin");
    ContactSplit sp = split_contact(alpha);
    SlicePipeline sl = slice_normalize(restrict_field(X), sp.gamma, N);
    return contact_certificate(sl, alpha, Jet(2 * alpha.n, tr));
}

NormalizationCertificate simul_normalize_tangential_contact(const VectorFieldJet& X,
                                                            const SingularContactJet& alpha, int N) {
    int nv = alpha.nvars(), tr = alpha.trunc();
    if (alpha.kind != ContactKind::Tangential)
        fail(ErrorCode::HypothesisFailed, "contact form is not of tangential kind");
    if (X.nvars != nv || X.trunc != tr || N > tr)
        fail(ErrorCode::DimensionMismatch, "field and contact form do not match");
    ContactSplit sp = split_contact(alpha);
    if (!X.comp(0).is_zero())
        fail(ErrorCode::TangentialStructureBroken, "field moves the distinguished coordinate");
    if (!X.apply(extend_jet(sp.f)).truncated(tr - 1).is_zero())
        fail(ErrorCode::TangentialStructureBroken, "field moves the tangency divisor");
    ContactPreservationReport rep = verify_contact_preservation(X, alpha);
    if (!rep.preserved) fail(ErrorCode::PreservationFailed, "field does not preserve the contact form");
    if (!rep.theta_independent)
        fail(ErrorCode::StructuralPropertyViolated, "preserving field must be basic over the slice");
    if (!X.vanishes_at_origin()) fail(ErrorCode::ConstantTermNonzero, "field must vanish at the origin");
    SlicePipeline sl = slice_normalize(restrict_field(X), sp.gamma, N);
    Jet f_nf = jet_compose(sp.f, map_inverse(sl.Psi));
    return contact_certificate(sl, alpha, f_nf);
}

PrimitiveFormReport check_primitive_normal_form(const FormJet& gamma, const std::vector<Scalar>& lambda) {
    int n2 = gamma.nvars(), tr = gamma.trunc();
    int n = n2 / 2;
    if (n2 % 2 != 0 || static_cast<int>(lambda.size()) != n || gamma.degree() != 1)
        fail(ErrorCode::DimensionMismatch, "primitive form data has inconsistent dimensions");
    for (const auto& [idx, c] : gamma.comps())
        if (!c.constant_term().is_zero())
            fail(ErrorCode::NotPrimitiveShape, "primitive part has a constant term");
    FormJet gs(n2, tr, 1);
    for (int j = 0; j < n; ++j) {
        gs.add({n + j}, lambda[static_cast<std::size_t>(j)] * Jet::variable(n2, tr, j));
        gs.add({j}, (lambda[static_cast<std::size_t>(j)] - Scalar(1)) * Jet::variable(n2, tr, n + j));
    }
    FormJet rest = gamma - gs;
    if (!exterior_d(rest).all_zero())
        fail(ErrorCode::NotPrimitiveShape, "non-semisimple part is not exact");
    Jet S = primitive_function(rest);
    if (exterior_d(S) != rest)
        fail(ErrorCode::NotPrimitiveShape, "primitive escapes the truncation");
    Jet Q = S.graded_part(2);
    Jet R = S - Q;
    PrimitiveFormReport rep;
    Jet matched(n2, tr);
    const Scalar half = Scalar(1) / Scalar(2);
    int s = 0;
    while (s < n) {
        int d = 1;
        while (s + d < n && lambda[static_cast<std::size_t>(s + d)] == lambda[static_cast<std::size_t>(s)]) ++d;
        const Scalar& l = lambda[static_cast<std::size_t>(s)];
        Jet QB(n2, tr);
        for (const auto& [m, c] : Q.terms()) {
            bool inside = true;
            for (int i = 0; i < n2; ++i) {
                if (m.e[static_cast<std::size_t>(i)] == 0) continue;
                int x = i < n ? i : i - n;
                if (x < s || x >= s + d) inside = false;
            }
            if (inside) QB.add_term(m, c);
        }
        auto chain = [&](bool shifted) {
            Jet q(n2, tr);
            for (int j = s; j < s + d - 1; ++j) {
                if (shifted)
                    q += Scalar(2) * Jet::variable(n2, tr, j) * Jet::variable(n2, tr, n + j + 1);
                else
                    q += Jet::variable(n2, tr, j + 1) * Jet::variable(n2, tr, n + j);
            }
            return q;
        };
        int q_case = -1;
        if (QB.is_zero()) {
            q_case = 0;
        } else if (l != half && d >= 2 && QB == chain(false)) {
            q_case = 1;
        } else if (l == half && d == 1 &&
                   QB == Jet::variable(n2, tr, n + s) * Jet::variable(n2, tr, n + s)) {
            q_case = 2;
        } else if (l == half && d >= 2) {
            Jet sq = Jet::variable(n2, tr, s + d - 1) * Jet::variable(n2, tr, s + d - 1);
            if (QB == chain(true) + (d % 2 == 0 ? sq : -sq))
                q_case = 3;
            else if (d % 2 == 1 && d >= 3 && QB == chain(true))
                q_case = 4;
        }
        if (q_case < 0) fail(ErrorCode::NotPrimitiveShape, "quadratic part is not of a listed type");
        matched += QB;
        rep.blocks.push_back({s, d, l, q_case});
        s += d;
    }
    if (Q != matched) fail(ErrorCode::NotPrimitiveShape, "quadratic part mixes eigenvalue blocks");
    std::vector<Scalar> lamhat = lambda;
    for (int j = 0; j < n; ++j) lamhat.push_back(Scalar(1) - lambda[static_cast<std::size_t>(j)]);
    for (const auto& [m, c] : R.terms()) {
        Scalar w = monomial_pairing(m, lamhat);
        rep.residual_R_support.emplace_back(m, w);
        if (!(w == Scalar(1)))
            fail(ErrorCode::NotPrimitiveShape, "residual monomial violates the resonance relation");
    }
    rep.matches_normal_form = true;
    return rep;
}

} // namespace nfkit
