#include "nfkit/toriclaw.hpp"

#include <algorithm>

#include "nfkit/error.hpp"

namespace nfkit {

namespace {

template <typename F>
TensorValue visit_tensor(const TensorValue& T, F&& f) {
    return std::visit([&](const auto& t) -> TensorValue { return f(t); }, T);
}

void require_diagonal_normal_form(const VectorFieldJet& X, std::vector<Scalar>& gamma) {
    Mat L = X.linear_part();
    int n = X.nvars;
    gamma.clear();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (i != j && !L[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_zero())
                fail(ErrorCode::NotInNormalForm, "linear part is not diagonal");
        gamma.push_back(L[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
    }
    if (!is_resonant_field(gamma, X))
        fail(ErrorCode::NotInNormalForm, "field has nonresonant terms");
}

} // namespace

int tensor_nvars(const TensorValue& T) {
    return std::visit([](const auto& t) { return t.nvars(); }, T);
}

int tensor_trunc(const TensorValue& T) {
    return std::visit([](const auto& t) { return t.trunc(); }, T);
}

bool tensor_is_zero(const TensorValue& T) {
    return std::visit([](const auto& t) { return t.all_zero(); }, T);
}

TensorValue tensor_scale(const Jet& f, const TensorValue& T) {
    return visit_tensor(T, [&](const auto& t) { return f * t; });
}

TensorValue tensor_sub(const TensorValue& a, const TensorValue& b) {
    if (a.index() != b.index()) fail(ErrorCode::DimensionMismatch, "mixed tensor variances");
    if (std::holds_alternative<FormJet>(a))
        return std::get<FormJet>(a) - std::get<FormJet>(b);
    return std::get<MultiVectorJet>(a) - std::get<MultiVectorJet>(b);
}

TensorValue tensor_lie(const VectorFieldJet& X, const TensorValue& T) {
    return visit_tensor(T, [&](const auto& t) { return lie_derivative(X, t); });
}

RationalTensorJet make_rational(TensorValue numerator, Jet denominator) {
    if (denominator.is_zero()) fail(ErrorCode::NotAUnit, "denominator must be nonzero");
    int n = denominator.nvars();
    bool progress = true;
    while (progress) {
        progress = false;
        for (int v = 0; v < n && !progress; ++v) {
            Monomial xv(n);
            xv.e[static_cast<std::size_t>(v)] = 1;
            auto divisible = [&](const Jet& c) {
                for (const auto& [m, coef] : c.terms())
                    if (!xv.divides(m)) return false;
                return true;
            };
            if (!divisible(denominator)) continue;
            bool all = std::visit(
                [&](const auto& t) {
                    for (const auto& [idx, c] : t.comps())
                        if (!divisible(c)) return false;
                    return true;
                },
                numerator);
            if (!all) continue;
            Jet xvj = Jet::variable(n, denominator.trunc(), v);
            denominator = divide_exact(denominator, xvj);
            numerator = visit_tensor(numerator, [&](const auto& t) {
                auto r = t;
                for (const auto& [idx, c] : t.comps()) r.set_sorted(idx, divide_exact(c, xvj));
                return r;
            });
            progress = true;
        }
    }
    return RationalTensorJet{std::move(numerator), std::move(denominator), true};
}

namespace {

// Weight of a monomial tensor term under one integer generator row.
long term_weight(const Monomial& m, const IndexTuple& idx, bool covariant, const std::vector<long>& zrow) {
    long w = monomial_weight(m, zrow);
    for (int j : idx) w += covariant ? zrow[static_cast<std::size_t>(j)] : -zrow[static_cast<std::size_t>(j)];
    return w;
}

template <typename T>
T average_linear_chart(const T& t, const ToricAction& torus, bool covariant) {
    T out(t.nvars(), t.trunc(), t.degree());
    for (const auto& [idx, c] : t.comps()) {
        Jet kept(t.nvars(), t.trunc());
        for (const auto& [m, coef] : c.terms()) {
            bool zero_weight = true;
            for (const auto& zrow : torus.Z)
                if (term_weight(m, idx, covariant, zrow) != 0) zero_weight = false;
            if (zero_weight) kept.add_term(m, coef);
        }
        out.set_sorted(idx, kept);
    }
    out.prune();
    return out;
}

} // namespace

TensorValue toric_average(const TensorValue& T, const FormalMap& Phi, const ToricAction& torus) {
    if (!mat_inverse(Phi.linear_part()))
        fail(ErrorCode::SingularLinearPart, "linearizing chart has a singular linear part");
    if (std::holds_alternative<FormJet>(T)) {
        FormJet w = transport(Phi, std::get<FormJet>(T));
        w = average_linear_chart(w, torus, true);
        return transport(map_inverse(Phi), w);
    }
    MultiVectorJet w = pushforward(Phi, std::get<MultiVectorJet>(T));
    w = average_linear_chart(w, torus, false);
    return pushforward(map_inverse(Phi), w);
}

VectorFieldJet toric_average(const VectorFieldJet& X, const FormalMap& Phi, const ToricAction& torus) {
    TensorValue avg = toric_average(TensorValue{mv_from_field(X)}, Phi, torus);
    return field_from_mv(std::get<MultiVectorJet>(avg));
}

namespace {

// Numerator of L_Z (Omega/f) over f^2.
TensorValue lie_numerator(const VectorFieldJet& Z, const RationalTensorJet& L) {
    TensorValue a = tensor_scale(L.denominator, tensor_lie(Z, L.numerator));
    TensorValue b = tensor_scale(Z.apply(L.denominator), L.numerator);
    return tensor_sub(a, b);
}

// Solve R = g * (f * Omega) by exact division on the first usable component,
// cross-checked on all of them; nullopt when no consistent g exists.
std::optional<Jet> solve_gauge(const TensorValue& R, const RationalTensorJet& L) {
    TensorValue base = tensor_scale(L.denominator, L.numerator);
    int n = tensor_nvars(R);
    int N = tensor_trunc(R);
    Jet g(n, N);
    bool have = false;
    auto pick = [&](const auto& baset, const auto& rt) {
        for (const auto& [idx, c] : baset.comps()) {
            if (c.is_zero()) continue;
            Jet rc = rt.comp(idx);
            try {
                g = divide_exact(rc, c);
                have = true;
            } catch (const Error&) {
                continue;
            }
            return;
        }
    };
    if (std::holds_alternative<FormJet>(base))
        pick(std::get<FormJet>(base), std::get<FormJet>(R));
    else
        pick(std::get<MultiVectorJet>(base), std::get<MultiVectorJet>(R));
    if (!have) {
        if (tensor_is_zero(R)) return Jet(n, N);
        return std::nullopt;
    }
    TensorValue residual = tensor_sub(R, tensor_scale(g, base));
    if (!tensor_is_zero(residual)) return std::nullopt;
    return g;
}

} // namespace

ConservationReport verify_conservation(const VectorFieldJet& X_nf, const RationalTensorJet& Lambda,
                                       const ToricAction& torus, ConservationMode mode) {
    std::vector<Scalar> gamma;
    require_diagonal_normal_form(X_nf, gamma);
    ConservationReport rep{false, Jet(X_nf.nvars, X_nf.trunc), {}, {}, false};
    TensorValue hyp = lie_numerator(X_nf, Lambda);
    if (mode == ConservationMode::Invariant) {
        if (!tensor_is_zero(hyp))
            fail(ErrorCode::HypothesisFailed, "the tensor is not invariant under the field");
        rep.hypothesis_ok = true;
        rep.hypothesis_gauge = Jet(X_nf.nvars, X_nf.trunc);
    } else {
        auto g = solve_gauge(hyp, Lambda);
        if (!g) fail(ErrorCode::HypothesisFailed, "the tensor is not a semi-invariant of the field");
        rep.hypothesis_ok = true;
        rep.hypothesis_gauge = *g;
    }
    rep.conserved = true;
    for (const auto& zrow : torus.Z) {
        std::vector<Scalar> zd;
        zd.reserve(zrow.size());
        for (long z : zrow) zd.push_back(Scalar(z));
        VectorFieldJet Z = VectorFieldJet::diagonal(X_nf.trunc, zd);
        TensorValue R = lie_numerator(Z, Lambda);
        if (mode == ConservationMode::Invariant) {
            rep.gauges.push_back(Jet(X_nf.nvars, X_nf.trunc));
            rep.residuals.push_back(R);
            if (!tensor_is_zero(R)) rep.conserved = false;
        } else {
            auto gk = solve_gauge(R, Lambda);
            if (gk) {
                rep.gauges.push_back(*gk);
                rep.residuals.push_back(tensor_sub(
                    R, tensor_scale(*gk, tensor_scale(Lambda.denominator, Lambda.numerator))));
            } else {
                rep.gauges.push_back(Jet(X_nf.nvars, X_nf.trunc));
                rep.residuals.push_back(R);
            }
            if (!tensor_is_zero(rep.residuals.back())) rep.conserved = false;
        }
    }
    return rep;
}

WalcherResult walcher_gauge(const VectorFieldJet& X_nf, const Jet& F, int N) {
    std::vector<Scalar> gamma;
    require_diagonal_normal_form(X_nf, gamma);
    if (F.is_zero()) fail(ErrorCode::NotSemiInvariant, "zero function has no gauge");
    int n = X_nf.nvars, tr = X_nf.trunc;
    if (N > tr) fail(ErrorCode::DimensionMismatch, "degree exceeds the truncation");
    Jet Ft = F;
    Jet beta = Jet::one(n, tr);
    auto lambda_of = [&](const Jet& G) {
        try {
            return divide_exact(X_nf.apply(G), G);
        } catch (const Error&) {
            fail(ErrorCode::NotSemiInvariant, "function is not a semi-invariant of the field");
        }
    };
    Jet lam = lambda_of(Ft);
    Scalar lam0 = lam.constant_term();
    for (int k = 1; k <= N; ++k) {
        Jet lam_k = lam.graded_part(k);
        Jet beta_k(n, tr);
        for (const auto& [m, c] : lam_k.terms()) {
            Scalar mu = monomial_pairing(m, gamma);
            if (!mu.is_zero()) beta_k.add_term(m, Scalar(0) - c / mu);
        }
        if (beta_k.is_zero()) continue;
        Jet factor = Jet::one(n, tr) + beta_k;
        Ft = factor * Ft;
        beta = factor * beta;
        lam = lambda_of(Ft);
    }
    VectorFieldJet S = VectorFieldJet::diagonal(tr, gamma);
    if (!(S.apply(Ft) - lam0 * Ft).truncated(N).is_zero())
        fail(ErrorCode::Internal, "gauge did not reach a semisimple semi-invariant");
    ToricAction torus = toric_generators(gamma);
    const Monomial& alpha0 = Ft.terms().begin()->first;
    std::vector<Scalar> c;
    for (const auto& zrow : torus.Z) {
        Scalar ck(monomial_weight(alpha0, zrow));
        std::vector<Scalar> zd;
        zd.reserve(zrow.size());
        for (long z : zrow) zd.push_back(Scalar(z));
        VectorFieldJet Z = VectorFieldJet::diagonal(tr, zd);
        if (!(Z.apply(Ft) - ck * Ft).truncated(N).is_zero())
            fail(ErrorCode::Internal, "gauge output is not a torus semi-invariant");
        c.push_back(ck);
    }
    return WalcherResult{beta, c, lam0};
}

} // namespace nfkit
