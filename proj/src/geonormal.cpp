#include "nfkit/geonormal.hpp"

#include <algorithm>

#include "nfkit/error.hpp"
#include "nfkit/toriclaw.hpp"
#include "nfkit/tpoly.hpp"

namespace nfkit {

namespace {

IndexTuple full_tuple(int n) {
    IndexTuple idx;
    for (int i = 0; i < n; ++i) idx.push_back(i);
    return idx;
}

Monomial unit_mono(int n, int i) {
    Monomial m(n);
    m.e[static_cast<std::size_t>(i)] = 1;
    return m;
}

Jet retrunc(const Jet& f, int tr) {
    Jet r(f.nvars(), tr);
    for (const auto& [m, c] : f.terms())
        if (m.degree() <= tr) r.add_term(m, c);
    return r;
}

FormalMap swap_map(int n, int tr, int a, int b) {
    FormalMap s = FormalMap::identity(n, tr);
    s.comp(a) = Jet::variable(n, tr, b);
    s.comp(b) = Jet::variable(n, tr, a);
    return s;
}

FormalMap diag_map(int n, int tr, int i, const Scalar& d) {
    Mat A = mat_identity(n);
    A[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = d;
    return FormalMap::linear(tr, A);
}

// Graph x_1 = h(x_2..x_n) of {f = 0} near O, assuming d_1 f(O) != 0.
Jet implicit_graph(const Jet& f) {
    int n = f.nvars(), N = f.trunc();
    Jet h(n, N);
    Jet df = jet_partial(f, 0);
    for (int it = 0; it <= 2 * N + 2; ++it) {
        std::vector<Jet> comps;
        comps.push_back(h);
        for (int i = 1; i < n; ++i) comps.push_back(Jet::variable(n, N, i));
        Jet e = jet_compose(f, comps);
        if (e.is_zero()) return h;
        h = h - e * unit_function(jet_compose(df, comps), UnitKind::Reciprocal);
    }
    fail(ErrorCode::Internal, "implicit straightening did not converge");
}

// Radial homotopy primitives; dF = xi resp. d(eta) = mu to degree trunc-1.
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

FormJet primitive_one_form(const FormJet& mu) {
    int n = mu.nvars(), N = mu.trunc();
    FormJet xi(n, N, 1);
    for (const auto& [idx, c] : mu.comps()) {
        int a = idx[0], b = idx[1];
        for (const auto& [m, coef] : c.terms()) {
            if (m.degree() + 1 > N) continue;
            Scalar s = coef / Scalar(m.degree() + 2);
            Monomial ma = m;
            ma.e[static_cast<std::size_t>(a)] += 1;
            Monomial mb = m;
            mb.e[static_cast<std::size_t>(b)] += 1;
            Jet cb(n, N);
            cb.add_term(ma, s);
            Jet ca(n, N);
            ca.add_term(mb, -s);
            xi.add({b}, cb);
            xi.add({a}, ca);
        }
    }
    xi.prune();
    return xi;
}

Jet drop_variable(const Jet& f, int v) {
    Jet r(f.nvars(), f.trunc());
    for (const auto& [m, c] : f.terms())
        if (m.e[static_cast<std::size_t>(v)] == 0) r.add_term(m, c);
    return r;
}

void project_weight_zero(TFieldJet& Y, const ToricAction& act) {
    int n = Y.nvars, N = Y.trunc;
    for (int i = 0; i < n; ++i) {
        TJet kept(n, N);
        for (const auto& [k, c] : Y.comp(i).coeffs()) {
            Jet jc(n, N);
            for (const auto& [m, coef] : c.terms()) {
                bool zero = true;
                for (const auto& zrow : act.Z)
                    if (monomial_weight(m, zrow) != zrow[static_cast<std::size_t>(i)]) zero = false;
                if (zero) jc.add_term(m, coef);
            }
            if (!jc.is_zero()) kept.add_coeff(k, jc);
        }
        Y.comp(i) = kept;
    }
}

long row_weight_of(const Jet& f, const std::vector<long>& zrow) {
    bool have = false;
    long w = 0;
    for (const auto& [m, c] : f.terms()) {
        long mw = monomial_weight(m, zrow);
        if (!have) {
            w = mw;
            have = true;
        } else if (mw != w) {
            fail(ErrorCode::WeightViolation, "function is not weight-homogeneous");
        }
    }
    if (!have) fail(ErrorCode::WeightViolation, "zero function has no weight");
    return w;
}

bool log_zero_to(const LogFormJet& w, int d) {
    if (!w.regular.truncated(d).all_zero()) return false;
    for (const auto& [i, b] : w.log_parts)
        if (!b.truncated(d).all_zero()) return false;
    return true;
}

LogFormJet log_truncated(const LogFormJet& w, int d) {
    LogFormJet r = w;
    r.regular = r.regular.truncated(d);
    for (auto& [i, b] : r.log_parts) b = b.truncated(d);
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

// Shared canonicalization with a selectable rescaling axis policy; when
// avoid_last is set, the last coordinate must stay untouched (flow direction).
FormalMap canon_log_nambu_axis(const MultiVectorJet& Lambda, int N, bool avoid_last) {
    int n = Lambda.nvars(), tr = Lambda.trunc();
    if (Lambda.degree() != n) fail(ErrorCode::DimensionMismatch, "log-Nambu structure must be a top multivector");
    if (N > tr) fail(ErrorCode::DimensionMismatch, "degree exceeds the truncation");
    Jet g = Lambda.comp(full_tuple(n));
    if (!g.constant_term().is_zero())
        fail(ErrorCode::DegenerateSingularity, "coefficient does not vanish at the origin");
    int p = -1;
    int plimit = avoid_last ? n - 1 : n;
    for (int i = 0; i < plimit && p < 0; ++i)
        if (!g.coeff(unit_mono(n, i)).is_zero()) p = i;
    if (p < 0) fail(ErrorCode::DegenerateSingularity, "coefficient vanishes to second order");
    FormalMap total = FormalMap::identity(n, tr);
    if (p != 0) {
        FormalMap s = swap_map(n, tr, 0, p);
        g = Scalar(-1) * jet_compose(g, s);
        total = s;
    }
    Jet h = implicit_graph(g);
    if (!h.is_zero()) {
        std::vector<Jet> back;
        back.push_back(Jet::variable(n, tr, 0) + h);
        for (int i = 1; i < n; ++i) back.push_back(Jet::variable(n, tr, i));
        g = jet_compose(g, back);
        FormalMap m2 = FormalMap::identity(n, tr);
        m2.comp(0) = Jet::variable(n, tr, 0) - h;
        total = map_compose(m2, total);
    }
    Jet u = divide_exact(g, Jet::variable(n, tr, 0));
    if (u != Jet::one(n, tr)) {
        if (avoid_last && n < 3)
            fail(ErrorCode::DegenerateSingularity, "no transverse direction absorbs the unit factor");
        FormalMap m3 = FormalMap::identity(n, tr);
        m3.comp(1) = jet_integrate(unit_function(u, UnitKind::Reciprocal), 1);
        total = map_compose(m3, total);
    }
    return total;
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

} // namespace

bool structure_is_zero(const StructureValue& S) {
    return std::visit([](const auto& s) { return s.all_zero(); }, S);
}

FormJet folded_volume_model(int nvars, int trunc) {
    FormJet w(nvars, trunc, nvars);
    w.add(full_tuple(nvars), Jet::variable(nvars, trunc, 0));
    return w;
}

MultiVectorJet log_nambu_model(int nvars, int trunc) {
    MultiVectorJet w(nvars, trunc, nvars);
    w.add(full_tuple(nvars), Jet::variable(nvars, trunc, 0));
    return w;
}

FormJet multifolded_model(int nvars, int m, int trunc) {
    if (nvars % 2 != 0 || m < 0 || 2 * m > nvars)
        fail(ErrorCode::DimensionMismatch, "bad multi-folded dimensions");
    FormJet w(nvars, trunc, 2);
    for (int i = 0; i < m; ++i) w.add({i, m + i}, Jet::variable(nvars, trunc, i));
    int r = (nvars - 2 * m) / 2;
    for (int j = 0; j < r; ++j) w.add({2 * m + j, 2 * m + r + j}, Jet::one(nvars, trunc));
    return w;
}

LogFormJet log_symplectic_model(int nvars, int k, int trunc) {
    if (nvars % 2 != 0 || k < 0 || 2 * k > nvars)
        fail(ErrorCode::DimensionMismatch, "bad log-symplectic dimensions");
    std::vector<int> logs;
    for (int i = 0; i < k; ++i) logs.push_back(2 * i);
    LogFormJet w(logs, nvars, trunc, 2);
    for (int i = 0; i < k; ++i) {
        FormJet dy(nvars, trunc, 1);
        dy.add({2 * i + 1}, Jet::one(nvars, trunc));
        w.log_parts.at(2 * i) = dy;
    }
    int r = (nvars - 2 * k) / 2;
    for (int j = 0; j < r; ++j) w.regular.add({2 * k + j, 2 * k + r + j}, Jet::one(nvars, trunc));
    return w;
}

bool NormalizationCertificate::valid() const {
    if (!structure_is_zero(structure_residual)) return false;
    if (!dynamics_residual.is_zero()) return false;
    return resonance.ok;
}

FormalMap canon_folded_volume(const FormJet& Omega, int N) {
    int n = Omega.nvars(), tr = Omega.trunc();
    if (Omega.degree() != n) fail(ErrorCode::DimensionMismatch, "folded volume must be a top form");
    if (N > tr) fail(ErrorCode::DimensionMismatch, "degree exceeds the truncation");
    Jet f = Omega.comp(full_tuple(n));
    if (!f.constant_term().is_zero())
        fail(ErrorCode::DegenerateFold, "coefficient does not vanish at the origin");
    int p = -1;
    for (int i = 0; i < n && p < 0; ++i)
        if (!f.coeff(unit_mono(n, i)).is_zero()) p = i;
    if (p < 0) fail(ErrorCode::DegenerateFold, "coefficient vanishes to second order");
    FormalMap total = FormalMap::identity(n, tr);
    if (p != 0) {
        FormalMap s = swap_map(n, tr, 0, p);
        f = Scalar(-1) * jet_compose(f, s);
        total = s;
    }
    Jet h = implicit_graph(f);
    if (!h.is_zero()) {
        std::vector<Jet> back;
        back.push_back(Jet::variable(n, tr, 0) + h);
        for (int i = 1; i < n; ++i) back.push_back(Jet::variable(n, tr, i));
        f = jet_compose(f, back);
        FormalMap m2 = FormalMap::identity(n, tr);
        m2.comp(0) = Jet::variable(n, tr, 0) - h;
        total = map_compose(m2, total);
    }
    // One extra degree so the antiderivative keeps full accuracy.
    Jet x1l = Jet::variable(n, tr + 1, 0);
    Jet gl = jet_integrate(retrunc(f, tr + 1), 0);
    Jet htil = divide_exact(gl, x1l * x1l);
    Jet s2 = unit_function(Scalar(2) * htil, UnitKind::Sqrt);
    FormalMap m3 = FormalMap::identity(n, tr);
    m3.comp(0) = retrunc(x1l * s2, tr);
    return map_compose(m3, total);
}

FormalMap canon_log_nambu(const MultiVectorJet& Lambda, int N) {
    return canon_log_nambu_axis(Lambda, N, false);
}

namespace {

FormalMap moser_folded_volume(const FormJet& G0, const FormJet& G1,
                              const std::optional<ToricAction>& weights, int N) {
    int n = G0.nvars(), tr = G0.trunc();
    if (G0 != folded_volume_model(n, tr))
        fail(ErrorCode::HypothesisFailed, "path solver needs the canonical base point");
    FormJet D = G1 - G0;
    if (D.all_zero()) return FormalMap::identity(n, tr);
    Jet d = D.comp(full_tuple(n));
    if (d.order() < 2) fail(ErrorCode::OrderTooLow, "perturbation must vanish to second order");
    Jet theta(n, tr);
    try {
        theta = divide_exact(d, Jet::variable(n, tr, 0));
    } catch (const Error&) {
        fail(ErrorCode::PrimitiveNotDivisible, "perturbation is not divisible by the fold coordinate");
    }
    Jet x1l = Jet::variable(n, tr + 1, 0);
    Jet w = jet_integrate(x1l * retrunc(theta, tr + 1), 0);
    Jet q = retrunc(divide_exact(w, x1l), tr);
    TJet denom = TJet::from_jet(Jet::one(n, tr)) + TJet::t_term(1, theta);
    TFieldJet Y(n, tr);
    Y.comp(0) = TJet(n, tr) - q * tjet_reciprocal(denom);
    if (weights) project_weight_zero(Y, *weights);
    return map_inverse(time1_flow(Y));
}

FormalMap moser_log_nambu(const MultiVectorJet& G0, const MultiVectorJet& G1,
                          const std::optional<ToricAction>& weights, int N) {
    int n = G0.nvars(), tr = G0.trunc();
    if (G0 != log_nambu_model(n, tr))
        fail(ErrorCode::HypothesisFailed, "path solver needs the canonical base point");
    MultiVectorJet D = G1 - G0;
    if (D.all_zero()) return FormalMap::identity(n, tr);
    Jet p = D.comp(full_tuple(n));
    if (p.order() < 2) fail(ErrorCode::OrderTooLow, "perturbation must vanish to second order");
    Jet pi(n, tr);
    try {
        pi = divide_exact(p, Jet::variable(n, tr, 0));
    } catch (const Error&) {
        fail(ErrorCode::PrimitiveNotDivisible, "perturbation is not divisible by the divisor coordinate");
    }
    TJet one_t = TJet::from_jet(Jet::one(n, tr));
    TJet upi = one_t + TJet::t_term(1, pi);
    TJet rho = tjet_reciprocal(upi);
    TJet integ = tjet_integrate(pi * (rho * rho), 1);
    TFieldJet Y(n, tr);
    Y.comp(1) = upi * integ;
    if (weights) project_weight_zero(Y, *weights);
    return map_inverse(time1_flow(Y));
}

FormalMap moser_log_symplectic(const LogFormJet& G0, const LogFormJet& G1,
                               const std::optional<ToricAction>& weights, int N) {
    int n = G0.nvars(), tr = G0.trunc();
    if (G0.log_indices != G1.log_indices)
        fail(ErrorCode::DimensionMismatch, "path endpoints have different divisors");
    auto BJ = log_gram(G0);
    Mat B0 = mat_zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const Jet& e = BJ[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            if (e != Jet::constant(n, tr, e.constant_term()))
                fail(ErrorCode::HypothesisFailed, "path solver needs a constant-coefficient base point");
            B0[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = e.constant_term();
        }
    auto B0inv = mat_inverse(B0);
    if (!B0inv) fail(ErrorCode::DegenerateLogSymplectic, "base point is degenerate at the origin");
    LogFormJet D = G1 - G0;
    D.canonicalize();
    for (const auto& [i, b] : D.log_parts)
        if (!b.truncated(tr - 1).all_zero())
            fail(ErrorCode::HypothesisFailed, "path endpoints have different residues");
    FormJet mu = D.regular;
    if (mu.all_zero()) return FormalMap::identity(n, tr);
    if (mu.coeff_order() < 1) fail(ErrorCode::OrderTooLow, "perturbation must vanish at the origin");
    if (!exterior_d(mu).truncated(tr - 2).all_zero())
        fail(ErrorCode::NotClosed, "perturbation is not closed");
    FormJet xi = primitive_one_form(mu);
    std::vector<bool> is_log(static_cast<std::size_t>(n), false);
    for (int i : G0.log_indices) is_log[static_cast<std::size_t>(i)] = true;
    auto scale = [&](int i) {
        return is_log[static_cast<std::size_t>(i)] ? Jet::variable(n, tr, i) : Jet::one(n, tr);
    };
    std::vector<Jet> xihat;
    for (int q = 0; q < n; ++q) xihat.push_back(xi.comp({q}) * scale(q));
    std::vector<std::vector<Jet>> B1(static_cast<std::size_t>(n),
                                     std::vector<Jet>(static_cast<std::size_t>(n), Jet(n, tr)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b) B1[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                mu.comp({a, b}) * scale(a) * scale(b);
    // a . (B0 + t B1) = xihat by a Neumann iteration.
    std::vector<TJet> a(static_cast<std::size_t>(n), TJet(n, tr));
    for (int it = 0; it <= tr + 2; ++it) {
        std::vector<TJet> tmp;
        for (int q = 0; q < n; ++q) {
            TJet v = TJet::from_jet(xihat[static_cast<std::size_t>(q)]);
            for (int p = 0; p < n; ++p) {
                const Jet& e = B1[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
                if (!e.is_zero()) v -= a[static_cast<std::size_t>(p)] * TJet::t_term(1, e);
            }
            tmp.push_back(v);
        }
        std::vector<TJet> anew;
        for (int j = 0; j < n; ++j) {
            TJet v(n, tr);
            for (int q = 0; q < n; ++q)
                v += (*B0inv)[static_cast<std::size_t>(q)][static_cast<std::size_t>(j)] *
                     tmp[static_cast<std::size_t>(q)];
            anew.push_back(v);
        }
        if (anew == a) break;
        a = anew;
    }
    TFieldJet Y(n, tr);
    for (int p = 0; p < n; ++p)
        Y.comp(p) = TJet(n, tr) - (is_log[static_cast<std::size_t>(p)]
                                       ? Jet::variable(n, tr, p) * a[static_cast<std::size_t>(p)]
                                       : a[static_cast<std::size_t>(p)]);
    if (weights) project_weight_zero(Y, *weights);
    if (Y.space_order() < 2) fail(ErrorCode::OrderTooLow, "path generator has a linear part");
    return map_inverse(time1_flow(Y));
}

} // namespace

FormalMap moser_path_solve(const StructureValue& G0, const StructureValue& G1, StructureKind kind,
                           const std::optional<ToricAction>& weights, int N) {
    switch (kind.tag) {
        case StructureTag::FoldedVolume:
            return moser_folded_volume(std::get<FormJet>(G0), std::get<FormJet>(G1), weights, N);
        case StructureTag::LogNambuTop:
            return moser_log_nambu(std::get<MultiVectorJet>(G0), std::get<MultiVectorJet>(G1), weights, N);
        case StructureTag::LogSymplectic:
            return moser_log_symplectic(std::get<LogFormJet>(G0), std::get<LogFormJet>(G1), weights, N);
        default:
            fail(ErrorCode::HypothesisFailed, "no path solver for this structure kind");
    }
}

namespace {

// Shared tail of the two singular-volume pipelines: after pd normalization,
// re-straighten the divisor equivariantly, fix the unit constant, run the
// Moser step, and assemble the certificate.
struct VolumePipeline {
    bool contravariant;
    int n, tr, N;
};

void check_divisor_weights(const Jet& h, const ToricAction& torus) {
    for (const auto& zrow : torus.Z)
        for (const auto& [m, c] : h.terms())
            if (monomial_weight(m, zrow) != zrow[0])
                fail(ErrorCode::HypothesisFailed, "singular hyperplane is not torus-invariant");
}

} // namespace

NormalizationCertificate simul_normalize_folded_volume(const VectorFieldJet& X, const FormJet& Omega, int N) {
    int n = X.nvars, tr = X.trunc;
    if (Omega.nvars() != n || Omega.trunc() != tr || Omega.degree() != n)
        fail(ErrorCode::DimensionMismatch, "field and structure do not match");
    if (!X.vanishes_at_origin()) fail(ErrorCode::ConstantTermNonzero, "field must vanish at the origin");
    if (!lie_derivative(X, Omega).truncated(tr - 1).all_zero())
        fail(ErrorCode::NotInvariant, "field does not preserve the structure");
    FormalMap Phi = canon_folded_volume(Omega, N);
    PDResult pd = pd_normalize(pushforward(Phi, X), N);
    Phi = map_compose(pd.Phi, Phi);
    VectorFieldJet Xn = pd.X_nf;
    FormJet Om = transport(Phi, Omega);
    std::vector<Scalar> gamma = pd.gamma;

    Jet f = Om.comp(full_tuple(n));
    int p = -1;
    for (int i = 0; i < n && p < 0; ++i)
        if (!f.coeff(unit_mono(n, i)).is_zero()) p = i;
    if (p < 0) fail(ErrorCode::DegenerateFold, "coefficient vanishes to second order");
    if (p != 0) {
        FormalMap s = swap_map(n, tr, 0, p);
        Om = transport(s, Om);
        Xn = pushforward(s, Xn);
        std::swap(gamma[0], gamma[static_cast<std::size_t>(p)]);
        Phi = map_compose(s, Phi);
        f = Om.comp(full_tuple(n));
    }
    ToricAction torus = toric_generators(gamma);
    Jet h = implicit_graph(f);
    if (!h.is_zero()) {
        check_divisor_weights(h, torus);
        FormalMap m2 = FormalMap::identity(n, tr);
        m2.comp(0) = Jet::variable(n, tr, 0) - h;
        Om = transport(m2, Om);
        Xn = pushforward(m2, Xn);
        Phi = map_compose(m2, Phi);
        f = Om.comp(full_tuple(n));
    }
    Scalar c = divide_exact(f, Jet::variable(n, tr, 0)).constant_term();
    if (c != Scalar(1)) {
        FormalMap D = FormalMap::identity(n, tr);
        if (n >= 2) {
            D = diag_map(n, tr, 1, c);
        } else {
            auto sq = scalar_sqrt(c);
            if (!sq) fail(ErrorCode::PerfectSquareRequired, "unit constant is not a square");
            D = diag_map(n, tr, 0, *sq);
        }
        Om = transport(D, Om);
        Xn = pushforward(D, Xn);
        Phi = map_compose(D, Phi);
    }
    FormJet model = folded_volume_model(n, tr);
    FormalMap M4 = moser_path_solve(StructureValue{model}, StructureValue{Om},
                                    {StructureTag::FoldedVolume, 0}, torus, N);
    Phi = map_compose(M4, Phi);
    Xn = pushforward(M4, Xn);
    Om = transport(M4, Om);

    NormalizationCertificate cert{Phi,
                                  Xn,
                                  StructureValue{Om},
                                  StructureValue{Om - model},
                                  lie_bracket(VectorFieldJet::diagonal(tr, gamma), Xn),
                                  gamma,
                                  torus,
                                  {}};
    Scalar rel = Scalar(2) * gamma[0];
    for (int i = 1; i < n; ++i) rel = rel + gamma[static_cast<std::size_t>(i)];
    cert.resonance.values = {rel};
    cert.resonance.ok = rel.is_zero();
    return cert;
}

NormalizationCertificate simul_normalize_log_nambu(const VectorFieldJet& X, const MultiVectorJet& Lambda, int N) {
    int n = X.nvars, tr = X.trunc;
    if (Lambda.nvars() != n || Lambda.trunc() != tr || Lambda.degree() != n)
        fail(ErrorCode::DimensionMismatch, "field and structure do not match");
    if (!X.vanishes_at_origin()) fail(ErrorCode::ConstantTermNonzero, "field must vanish at the origin");
    if (!lie_derivative(X, Lambda).truncated(tr - 1).all_zero())
        fail(ErrorCode::NotInvariant, "field does not preserve the structure");
    FormalMap Phi = canon_log_nambu(Lambda, N);
    PDResult pd = pd_normalize(pushforward(Phi, X), N);
    Phi = map_compose(pd.Phi, Phi);
    VectorFieldJet Xn = pd.X_nf;
    MultiVectorJet Lm = pushforward(Phi, Lambda);
    std::vector<Scalar> gamma = pd.gamma;

    Jet g = Lm.comp(full_tuple(n));
    int p = -1;
    for (int i = 0; i < n && p < 0; ++i)
        if (!g.coeff(unit_mono(n, i)).is_zero()) p = i;
    if (p < 0) fail(ErrorCode::DegenerateSingularity, "coefficient vanishes to second order");
    if (p != 0) {
        FormalMap s = swap_map(n, tr, 0, p);
        Lm = pushforward(s, Lm);
        Xn = pushforward(s, Xn);
        std::swap(gamma[0], gamma[static_cast<std::size_t>(p)]);
        Phi = map_compose(s, Phi);
        g = Lm.comp(full_tuple(n));
    }
    ToricAction torus = toric_generators(gamma);
    Jet h = implicit_graph(g);
    if (!h.is_zero()) {
        check_divisor_weights(h, torus);
        FormalMap m2 = FormalMap::identity(n, tr);
        m2.comp(0) = Jet::variable(n, tr, 0) - h;
        Lm = pushforward(m2, Lm);
        Xn = pushforward(m2, Xn);
        Phi = map_compose(m2, Phi);
        g = Lm.comp(full_tuple(n));
    }
    Scalar c = divide_exact(g, Jet::variable(n, tr, 0)).constant_term();
    if (c != Scalar(1)) {
        if (n < 2) fail(ErrorCode::DegenerateSingularity, "no transverse direction absorbs the unit factor");
        FormalMap D = diag_map(n, tr, 1, Scalar(1) / c);
        Lm = pushforward(D, Lm);
        Xn = pushforward(D, Xn);
        Phi = map_compose(D, Phi);
    }
    MultiVectorJet model = log_nambu_model(n, tr);
    FormalMap M4 = moser_path_solve(StructureValue{model}, StructureValue{Lm},
                                    {StructureTag::LogNambuTop, 0}, torus, N);
    Phi = map_compose(M4, Phi);
    Xn = pushforward(M4, Xn);
    Lm = pushforward(M4, Lm);

    NormalizationCertificate cert{Phi,
                                  Xn,
                                  StructureValue{Lm},
                                  StructureValue{Lm - model},
                                  lie_bracket(VectorFieldJet::diagonal(tr, gamma), Xn),
                                  gamma,
                                  torus,
                                  {}};
    Scalar rel(0);
    for (int i = 1; i < n; ++i) rel = rel + gamma[static_cast<std::size_t>(i)];
    cert.resonance.values = {rel};
    cert.resonance.ok = rel.is_zero();
    return cert;
}

NormalizationCertificate rectify_with_structure(const VectorFieldJet& X, const StructureValue& S, int N) {
    int n = X.nvars, tr = X.trunc;
    if (X.vanishes_at_origin()) fail(ErrorCode::HypothesisFailed, "field vanishes at the origin");
    bool contravariant = std::holds_alternative<MultiVectorJet>(S);
    if (std::holds_alternative<LogFormJet>(S))
        fail(ErrorCode::HypothesisFailed, "rectification supports volume structures only");
    if (contravariant) {
        const auto& Lm = std::get<MultiVectorJet>(S);
        if (Lm.nvars() != n || Lm.trunc() != tr || Lm.degree() != n)
            fail(ErrorCode::DimensionMismatch, "field and structure do not match");
        if (!lie_derivative(X, Lm).truncated(tr - 1).all_zero())
            fail(ErrorCode::NotInvariant, "field does not preserve the structure");
    } else {
        const auto& Om = std::get<FormJet>(S);
        if (Om.nvars() != n || Om.trunc() != tr || Om.degree() != n)
            fail(ErrorCode::DimensionMismatch, "field and structure do not match");
        if (!lie_derivative(X, Om).truncated(tr - 1).all_zero())
            fail(ErrorCode::NotInvariant, "field does not preserve the structure");
    }
    VectorFieldJet Xw = X;
    StructureValue Sw = S;
    auto transport_S = [&](const FormalMap& phi) {
        if (contravariant)
            Sw = pushforward(phi, std::get<MultiVectorJet>(Sw));
        else
            Sw = transport(phi, std::get<FormJet>(Sw));
    };
    FormalMap Phi = FormalMap::identity(n, tr);
    int p = -1;
    for (int i = 0; i < n && p < 0; ++i)
        if (!Xw.comp(i).constant_term().is_zero()) p = i;
    if (p != n - 1) {
        FormalMap s = swap_map(n, tr, p, n - 1);
        Xw = pushforward(s, Xw);
        transport_S(s);
        Phi = s;
    }
    Scalar c = Xw.comp(n - 1).constant_term();
    if (c != Scalar(1)) {
        FormalMap D = diag_map(n, tr, n - 1, Scalar(1) / c);
        Xw = pushforward(D, Xw);
        transport_S(D);
        Phi = map_compose(D, Phi);
    }
    // Flow-box chart by the Lie series of the straightened field.
    FormalMap psi(n, tr);
    Jet un = Jet::variable(n, tr, n - 1);
    for (int i = 0; i < n; ++i) {
        Jet acc(n, tr);
        Jet cur = Jet::variable(n, tr, i);
        Jet unpow = Jet::one(n, tr);
        Scalar invfact(1);
        for (int k = 0; k <= tr; ++k) {
            if (k > 0) invfact = invfact / Scalar(k);
            acc += invfact * (drop_variable(cur, n - 1) * unpow);
            cur = Xw.apply(cur);
            unpow *= un;
        }
        psi.comp(i) = acc;
    }
    FormalMap R = map_inverse(psi);
    Xw = pushforward(R, Xw);
    transport_S(R);
    Phi = map_compose(R, Phi);

    // The slice structure is independent of the flow coordinate.
    FormalMap Ps = FormalMap::identity(n, tr);
    if (contravariant) {
        Jet g = std::get<MultiVectorJet>(Sw).comp(full_tuple(n));
        if (!(g - drop_variable(g, n - 1)).truncated(tr - 1).is_zero())
            fail(ErrorCode::NotInvariant, "structure is not constant along the flow");
        MultiVectorJet Sc(n, tr, n);
        Sc.add(full_tuple(n), drop_variable(g, n - 1));
        Ps = canon_log_nambu_axis(Sc, N, true);
    } else {
        Jet f = std::get<FormJet>(Sw).comp(full_tuple(n));
        if (!(f - drop_variable(f, n - 1)).truncated(tr - 1).is_zero())
            fail(ErrorCode::NotInvariant, "structure is not constant along the flow");
        FormJet Sc(n, tr, n);
        Sc.add(full_tuple(n), drop_variable(f, n - 1));
        Ps = canon_folded_volume(Sc, N);
    }
    Xw = pushforward(Ps, Xw);
    transport_S(Ps);
    Phi = map_compose(Ps, Phi);

    VectorFieldJet dn(n, tr);
    dn.comp(n - 1) = Jet::one(n, tr);
    StructureValue residual = contravariant
        ? StructureValue{(std::get<MultiVectorJet>(Sw) - log_nambu_model(n, tr)).truncated(tr - 1)}
        : StructureValue{(std::get<FormJet>(Sw) - folded_volume_model(n, tr)).truncated(tr - 1)};
    NormalizationCertificate cert{Phi,
                                  Xw,
                                  Sw,
                                  residual,
                                  (Xw - dn).truncated(tr - 1),
                                  {},
                                  ToricAction{},
                                  {}};
    cert.resonance.ok = true;
    return cert;
}

FormalMap equivariant_canon_multifolded(const FormJet& omega, const VectorFieldJet& quasi_euler,
                                        const ToricAction& weights, int m, int N) {
    int n2 = omega.nvars(), tr = omega.trunc();
    if (omega.degree() != 2 || n2 % 2 != 0 || m < 0 || 2 * m > n2)
        fail(ErrorCode::DimensionMismatch, "bad multi-folded input");
    if (!exterior_d(omega).truncated(tr - 1).all_zero())
        fail(ErrorCode::NotClosed, "structure is not closed");
    for (const auto& zrow : weights.Z) {
        std::vector<Scalar> zd;
        for (long z : zrow) zd.push_back(Scalar(z));
        if (!lie_derivative(VectorFieldJet::diagonal(tr, zd), omega).all_zero())
            fail(ErrorCode::WeightViolation, "structure is not invariant under the torus");
    }
    auto check_qh = [&](const VectorFieldJet& E) {
        return (lie_derivative(E, omega) - Scalar(6) * omega).truncated(tr - 1).all_zero();
    };
    if (!check_qh(quasi_euler))
        fail(ErrorCode::QuasiHomogeneityViolated, "quasi-Euler field does not rescale the structure");
    VectorFieldJet E = toric_average(quasi_euler, FormalMap::identity(n2, tr), weights);
    if (!check_qh(E))
        fail(ErrorCode::QuasiHomogeneityViolated, "averaged quasi-Euler field does not rescale the structure");
    PDResult pe = equivariant_pd_normalize(E, weights, N);
    int c2 = 0, c3 = 0;
    for (const Scalar& g : pe.gamma) {
        if (g == Scalar(2)) ++c2;
        else if (g == Scalar(3)) ++c3;
        else fail(ErrorCode::QuasiHomogeneityViolated, "quasi-Euler spectrum is not {2,3}");
    }
    if (c2 != 2 * m || c3 != n2 - 2 * m)
        fail(ErrorCode::QuasiHomogeneityViolated, "quasi-Euler multiplicities do not match the fold rank");
    std::vector<int> order2, order3;
    for (int i = 0; i < n2; ++i)
        (pe.gamma[static_cast<std::size_t>(i)] == Scalar(2) ? order2 : order3).push_back(i);
    FormalMap Phi = pe.Phi;
    bool sorted = true;
    for (int i = 0; i < 2 * m; ++i)
        if (order2[static_cast<std::size_t>(i)] != i) sorted = false;
    if (!sorted) {
        FormalMap P(n2, tr);
        for (int i = 0; i < 2 * m; ++i) P.comp(i) = Jet::variable(n2, tr, order2[static_cast<std::size_t>(i)]);
        for (int j = 0; j < n2 - 2 * m; ++j)
            P.comp(2 * m + j) = Jet::variable(n2, tr, order3[static_cast<std::size_t>(j)]);
        Phi = map_compose(P, Phi);
    }
    FormJet om2 = transport(Phi, omega);

    // Quasi-homogeneity forces the exact degree-6 shape; coefficients of degree
    // two or more are certified to vanish.
    std::vector<int> wE;
    for (int i = 0; i < n2; ++i) wE.push_back(i < 2 * m ? 2 : 3);
    std::vector<std::tuple<int, int, int, Scalar>> uterms; // (coeff var, a, b, c)
    Mat AV = mat_zero(n2, n2);
    for (const auto& [idx, c] : om2.comps()) {
        int a = idx[0], b = idx[1];
        for (const auto& [mm, coef] : c.terms()) {
            if (mm.degree() >= 2) {
                if (mm.degree() <= tr - 1)
                    fail(ErrorCode::QuasiHomogeneityViolated, "structure has terms of the wrong weight");
                continue;
            }
            int wterm = wE[static_cast<std::size_t>(a)] + wE[static_cast<std::size_t>(b)];
            int k = -1;
            for (int i = 0; i < n2; ++i)
                if (mm.e[static_cast<std::size_t>(i)] == 1) k = i;
            if (k >= 0) wterm += wE[static_cast<std::size_t>(k)];
            if (wterm != 6)
                fail(ErrorCode::QuasiHomogeneityViolated, "structure has terms of the wrong weight");
            if (k < 0) {
                AV[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = coef;
                AV[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = -coef;
            } else {
                uterms.emplace_back(k, a, b, coef);
            }
        }
    }
    // Fold block: match sum_i u_i du_i ^ du_{m+i} up to pairing and scale.
    std::vector<int> partner(static_cast<std::size_t>(2 * m), -1);
    std::vector<Scalar> scale2(static_cast<std::size_t>(2 * m), Scalar(0));
    for (const auto& [k, a, b, coef] : uterms) {
        int lead, other;
        Scalar cc = coef;
        if (k == a) {
            lead = a;
            other = b;
        } else if (k == b) {
            lead = b;
            other = a;
            cc = -coef;
        } else {
            fail(ErrorCode::HypothesisFailed, "fold block is not of paired type");
        }
        if (partner[static_cast<std::size_t>(lead)] != -1 || partner[static_cast<std::size_t>(other)] != -1)
            fail(ErrorCode::HypothesisFailed, "fold block is not of paired type");
        partner[static_cast<std::size_t>(lead)] = other;
        partner[static_cast<std::size_t>(other)] = lead;
        scale2[static_cast<std::size_t>(lead)] = cc;
    }
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < 2 * m; ++i)
        if (!scale2[static_cast<std::size_t>(i)].is_zero()) pairs.emplace_back(i, partner[static_cast<std::size_t>(i)]);
    if (static_cast<int>(pairs.size()) != m)
        fail(ErrorCode::HypothesisFailed, "fold block is not of paired type");
    bool fold_canonical = true;
    for (int i = 0; i < m; ++i)
        if (pairs[static_cast<std::size_t>(i)] != std::make_pair(i, m + i) ||
            scale2[static_cast<std::size_t>(i)] != Scalar(1))
            fold_canonical = false;
    if (!fold_canonical) {
        Mat A = mat_zero(n2, n2);
        for (int i = 0; i < m; ++i) {
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(pairs[static_cast<std::size_t>(i)].first)] =
                Scalar(1);
            A[static_cast<std::size_t>(m + i)][static_cast<std::size_t>(pairs[static_cast<std::size_t>(i)].second)] =
                scale2[static_cast<std::size_t>(pairs[static_cast<std::size_t>(i)].first)];
        }
        for (int j = 2 * m; j < n2; ++j) A[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = Scalar(1);
        FormalMap MF = FormalMap::linear(tr, A);
        Phi = map_compose(MF, Phi);
        om2 = transport(MF, om2);
        AV = constant_gram(om2.truncated(0));
    }
    // Symplectic block.
    int r2 = n2 - 2 * m;
    if (r2 > 0) {
        Mat Az = mat_zero(r2, r2);
        for (int a = 0; a < r2; ++a)
            for (int b = 0; b < r2; ++b)
                Az[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    AV[static_cast<std::size_t>(2 * m + a)][static_cast<std::size_t>(2 * m + b)];
        if (!mat_inverse(Az)) fail(ErrorCode::DegenerateSymplecticForm, "symplectic block is degenerate");
        if (Az != canonical_symplectic(r2)) {
            auto P = symplectic_gram_schmidt(Az);
            if (!P) fail(ErrorCode::DegenerateSymplecticForm, "symplectic block is degenerate");
            auto Pinv = mat_inverse(*P);
            Mat A = mat_identity(n2);
            for (int a = 0; a < r2; ++a)
                for (int b = 0; b < r2; ++b)
                    A[static_cast<std::size_t>(2 * m + a)][static_cast<std::size_t>(2 * m + b)] =
                        (*Pinv)[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            FormalMap MZ = FormalMap::linear(tr, A);
            Phi = map_compose(MZ, Phi);
        }
    }
    FormJet check = transport(Phi, omega) - multifolded_model(n2, m, tr);
    if (!check.truncated(tr - 1).all_zero())
        fail(ErrorCode::Internal, "multi-folded canonicalization failed to reach the model");
    return Phi;
}

NormalizationCertificate simul_normalize_multifolded(const VectorFieldJet& X, const FormJet& omega, int N) {
    int n2 = X.nvars, tr = X.trunc;
    if (omega.nvars() != n2 || omega.trunc() != tr || omega.degree() != 2 || n2 % 2 != 0)
        fail(ErrorCode::DimensionMismatch, "field and structure do not match");
    if (!X.vanishes_at_origin()) fail(ErrorCode::ConstantTermNonzero, "field must vanish at the origin");
    int r = mat_rank(constant_gram(omega));
    int m = (n2 - r) / 2;
    FormJet model = multifolded_model(n2, m, tr);
    if (!(omega - model).truncated(tr - 1).all_zero())
        fail(ErrorCode::HypothesisFailed, "structure must be canonical in the input chart");
    if (!lie_derivative(X, omega).truncated(tr - 1).all_zero())
        fail(ErrorCode::NotInvariant, "field does not preserve the structure");
    std::vector<Scalar> we;
    for (int i = 0; i < n2; ++i) we.push_back(Scalar(i < 2 * m ? 2 : 3));
    VectorFieldJet E = VectorFieldJet::diagonal(tr, we);
    PDResult pd = pd_normalize(X, N);
    FormJet om1 = transport(pd.Phi, model);
    VectorFieldJet E1 = pushforward(pd.Phi, E);
    FormalMap Phi2 = equivariant_canon_multifolded(om1, E1, pd.torus, m, N);
    VectorFieldJet Xn = pushforward(Phi2, pd.X_nf);
    FormalMap Phi = map_compose(Phi2, pd.Phi);
    std::vector<Scalar> gamma = diagonal_eigenvalues(Xn);
    ToricAction torus = toric_generators(gamma);
    FormJet Om = transport(Phi, omega);
    NormalizationCertificate cert{Phi,
                                  Xn,
                                  StructureValue{Om},
                                  StructureValue{(Om - model).truncated(tr - 1)},
                                  lie_bracket(VectorFieldJet::diagonal(tr, gamma), Xn),
                                  gamma,
                                  torus,
                                  {}};
    cert.resonance.ok = true;
    for (int i = 0; i < m; ++i) {
        Scalar rel = Scalar(2) * gamma[static_cast<std::size_t>(i)] + gamma[static_cast<std::size_t>(m + i)];
        cert.resonance.values.push_back(rel);
        if (!rel.is_zero()) cert.resonance.ok = false;
    }
    int rr = (n2 - 2 * m) / 2;
    for (int j = 0; j < rr; ++j) {
        Scalar rel = gamma[static_cast<std::size_t>(2 * m + j)] + gamma[static_cast<std::size_t>(2 * m + rr + j)];
        cert.resonance.values.push_back(rel);
        if (!rel.is_zero()) cert.resonance.ok = false;
    }
    return cert;
}

namespace {

struct LogCanonResult {
    FormalMap Phi;
    std::optional<ToricAction> weights; // in the canonical chart
};

LogCanonResult canon_log_symplectic_impl(const LogFormJet& om_in, const std::optional<ToricAction>& weights,
                                         int N) {
    int n = om_in.nvars(), tr = om_in.trunc();
    if (om_in.degree() != 2 || n % 2 != 0)
        fail(ErrorCode::DimensionMismatch, "log-symplectic structure must be a 2-form in even dimension");
    LogFormJet om = om_in;
    om.canonicalize();
    int k = static_cast<int>(om.log_indices.size());
    if (2 * k > n) fail(ErrorCode::DegenerateLogSymplectic, "too many divisor components");
    if (!log_zero_to(log_exterior_d(om), tr - 1)) fail(ErrorCode::NotClosed, "structure is not closed");
    {
        auto BJ = log_gram(om);
        Mat B0 = mat_zero(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                B0[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    BJ[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].constant_term();
        if (!mat_inverse(B0)) fail(ErrorCode::DegenerateLogSymplectic, "h omega^n vanishes at the origin");
    }
    // Step 1: residues, their primitives, and the chart completion.
    std::vector<int> I = om.log_indices;
    std::vector<Jet> ys;
    for (int i : I) {
        const FormJet& beta = om.log_parts.at(i);
        FormJet xi(n, tr, 1);
        for (const auto& [idx, c] : beta.comps()) {
            if (idx[0] == i) continue;
            xi.add(idx, drop_variable(c, i));
        }
        xi.prune();
        if (!exterior_d(xi).truncated(tr - 1).all_zero())
            fail(ErrorCode::NotClosed, "divisor residue is not closed");
        ys.push_back(primitive_function(xi));
    }
    SpanTracker span;
    auto unit_vec = [&](int i) {
        Vec v(static_cast<std::size_t>(n), Scalar(0));
        v[static_cast<std::size_t>(i)] = Scalar(1);
        return v;
    };
    for (int i : I) span.add(unit_vec(i));
    for (const Jet& y : ys) {
        Vec v(static_cast<std::size_t>(n), Scalar(0));
        for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = y.coeff(unit_mono(n, j));
        if (!span.add(v)) fail(ErrorCode::DegenerateLogSymplectic, "degenerate residue pairing");
    }
    std::vector<int> zs;
    for (int j = 0; j < n; ++j)
        if (span.add(unit_vec(j))) zs.push_back(j);
    if (static_cast<int>(zs.size()) != n - 2 * k)
        fail(ErrorCode::Internal, "chart completion has the wrong size");
    FormalMap M(n, tr);
    for (int t = 0; t < k; ++t) {
        M.comp(2 * t) = Jet::variable(n, tr, I[static_cast<std::size_t>(t)]);
        M.comp(2 * t + 1) = ys[static_cast<std::size_t>(t)];
    }
    for (int j = 0; j < n - 2 * k; ++j)
        M.comp(2 * k + j) = Jet::variable(n, tr, zs[static_cast<std::size_t>(j)]);
    LogFormJet om1 = log_transport(M, om);
    om1.canonicalize();
    std::optional<ToricAction> w2;
    if (weights) {
        ToricAction act = *weights;
        std::vector<std::vector<long>> Z2;
        for (const auto& zrow : act.Z) {
            std::vector<long> row(static_cast<std::size_t>(n), 0);
            for (int t = 0; t < k; ++t) {
                row[static_cast<std::size_t>(2 * t)] = zrow[static_cast<std::size_t>(I[static_cast<std::size_t>(t)])];
                row[static_cast<std::size_t>(2 * t + 1)] = row_weight_of(ys[static_cast<std::size_t>(t)], zrow);
            }
            for (int j = 0; j < n - 2 * k; ++j)
                row[static_cast<std::size_t>(2 * k + j)] = zrow[static_cast<std::size_t>(zs[static_cast<std::size_t>(j)])];
            Z2.push_back(row);
        }
        act.Z = Z2;
        w2 = act;
    }
    // Step 2: kill the constant terms touching the log pairs.
    std::vector<int> logs2;
    for (int t = 0; t < k; ++t) logs2.push_back(2 * t);
    LogFormJet modelL(logs2, n, tr, 2);
    for (int t = 0; t < k; ++t) {
        FormJet dy(n, tr, 1);
        dy.add({2 * t + 1}, Jet::one(n, tr));
        modelL.log_parts.at(2 * t) = dy;
    }
    LogFormJet D1 = om1 - modelL;
    D1.canonicalize();
    for (const auto& [i, b] : D1.log_parts)
        if (!b.truncated(tr - 1).all_zero())
            fail(ErrorCode::Internal, "residues were not straightened");
    FormJet mu = D1.regular;
    std::vector<Jet> psi(static_cast<std::size_t>(k), Jet(n, tr));
    std::vector<Jet> phi(static_cast<std::size_t>(k), Jet(n, tr));
    for (const auto& [idx, c] : mu.comps()) {
        Scalar cc = c.constant_term();
        if (cc.is_zero()) continue;
        int p = idx[0], q = idx[1];
        if (p >= 2 * k && q >= 2 * k) continue; // symplectic block, handled below
        if (p < 2 * k && p % 2 == 0) {
            int i = p / 2;
            if (q == p + 1)
                psi[static_cast<std::size_t>(i)] += cc * Jet::variable(n, tr, p);
            else
                phi[static_cast<std::size_t>(i)] += cc * Jet::variable(n, tr, q);
        } else {
            int i = (p - 1) / 2;
            if (q < 2 * k && q % 2 == 0)
                phi[static_cast<std::size_t>(q / 2)] += -cc * Jet::variable(n, tr, p);
            else
                psi[static_cast<std::size_t>(i)] += -cc * Jet::variable(n, tr, q);
        }
    }
    FormalMap M2 = FormalMap::identity(n, tr);
    bool gauge = false;
    for (int i = 0; i < k; ++i) {
        if (!psi[static_cast<std::size_t>(i)].is_zero()) {
            M2.comp(2 * i) = Jet::variable(n, tr, 2 * i) *
                             unit_function(psi[static_cast<std::size_t>(i)], UnitKind::Exp);
            gauge = true;
        }
        if (!phi[static_cast<std::size_t>(i)].is_zero()) {
            M2.comp(2 * i + 1) = Jet::variable(n, tr, 2 * i + 1) +
                                 Jet::variable(n, tr, 2 * i) * phi[static_cast<std::size_t>(i)];
            gauge = true;
        }
    }
    LogFormJet om2 = gauge ? log_transport(M2, om1) : om1;
    om2.canonicalize();
    LogFormJet D2 = om2 - modelL;
    D2.canonicalize();
    for (const auto& [i, b] : D2.log_parts)
        if (!b.truncated(tr - 1).all_zero())
            fail(ErrorCode::Internal, "gauge step broke the residues");
    for (const auto& [idx, c] : D2.regular.comps())
        if (idx[0] < 2 * k && !c.constant_term().is_zero())
            fail(ErrorCode::Internal, "gauge step left constants on the log pairs");
    // Symplectic block Darboux.
    int r2 = n - 2 * k;
    FormalMap M3 = FormalMap::identity(n, tr);
    bool darboux = false;
    if (r2 > 0) {
        Mat A0 = constant_gram(D2.regular);
        Mat Az = mat_zero(r2, r2);
        for (int a = 0; a < r2; ++a)
            for (int b = 0; b < r2; ++b)
                Az[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    A0[static_cast<std::size_t>(2 * k + a)][static_cast<std::size_t>(2 * k + b)];
        if (!mat_inverse(Az)) fail(ErrorCode::DegenerateLogSymplectic, "transversal block is degenerate");
        if (Az != canonical_symplectic(r2)) {
            auto P = symplectic_gram_schmidt(Az);
            if (!P) fail(ErrorCode::DegenerateLogSymplectic, "transversal block is degenerate");
            auto Pinv = mat_inverse(*P);
            Mat A = mat_identity(n);
            for (int a = 0; a < r2; ++a)
                for (int b = 0; b < r2; ++b)
                    A[static_cast<std::size_t>(2 * k + a)][static_cast<std::size_t>(2 * k + b)] =
                        (*Pinv)[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            M3 = FormalMap::linear(tr, A);
            darboux = true;
        }
    }
    LogFormJet om3 = darboux ? log_transport(M3, om2) : om2;
    LogFormJet G0 = log_symplectic_model(n, k, tr);
    FormalMap M4 = moser_path_solve(StructureValue{G0}, StructureValue{om3},
                                    {StructureTag::LogSymplectic, k}, w2, N);
    FormalMap total = map_compose(M4, map_compose(M3, map_compose(M2, M)));
    return LogCanonResult{total, w2};
}

} // namespace

FormalMap canon_log_symplectic(const LogFormJet& omega, const std::optional<ToricAction>& weights, int N) {
    return canon_log_symplectic_impl(omega, weights, N).Phi;
}

NormalizationCertificate simul_normalize_log_symplectic(const VectorFieldJet& X, const LogFormJet& omega, int N) {
    int n = X.nvars, tr = X.trunc;
    if (omega.nvars() != n || omega.trunc() != tr || omega.degree() != 2)
        fail(ErrorCode::DimensionMismatch, "field and structure do not match");
    if (!X.vanishes_at_origin()) fail(ErrorCode::ConstantTermNonzero, "field must vanish at the origin");
    LogFormJet om = omega;
    om.canonicalize();
    if (!log_tangent(X, om.log_indices))
        fail(ErrorCode::LogTangencyViolated, "field is not tangent to the divisor");
    if (!log_zero_to(log_lie_derivative(X, om), tr - 1))
        fail(ErrorCode::NotInvariant, "field does not preserve the structure");
    PDResult pd = pd_normalize(X, N);
    LogFormJet om1 = log_transport(pd.Phi, om);
    LogCanonResult canon = canon_log_symplectic_impl(om1, pd.torus, N);
    VectorFieldJet Xn = pushforward(canon.Phi, pd.X_nf);
    FormalMap Phi = map_compose(canon.Phi, pd.Phi);
    std::vector<Scalar> gamma = diagonal_eigenvalues(Xn);
    ToricAction torus = toric_generators(gamma);
    int k = static_cast<int>(om.log_indices.size());
    LogFormJet model = log_symplectic_model(n, k, tr);
    LogFormJet Om = log_transport(Phi, om);
    NormalizationCertificate cert{Phi,
                                  Xn,
                                  StructureValue{Om},
                                  // The verification transport divides by the divisor coordinate
                                  // on top of the derivative, so the residual is certified at tr - 2.
                                  StructureValue{log_truncated(Om - model, tr - 2)},
                                  lie_bracket(VectorFieldJet::diagonal(tr, gamma), Xn),
                                  gamma,
                                  torus,
                                  {}};
    cert.resonance.ok = true;
    for (int i = 0; i < k; ++i) {
        Scalar rel = gamma[static_cast<std::size_t>(2 * i + 1)];
        cert.resonance.values.push_back(rel);
        if (!rel.is_zero()) cert.resonance.ok = false;
    }
    int r2 = (n - 2 * k) / 2;
    for (int j = 0; j < r2; ++j) {
        Scalar rel = gamma[static_cast<std::size_t>(2 * k + j)] + gamma[static_cast<std::size_t>(2 * k + r2 + j)];
        cert.resonance.values.push_back(rel);
        if (!rel.is_zero()) cert.resonance.ok = false;
    }
    return cert;
}

} // namespace nfkit
