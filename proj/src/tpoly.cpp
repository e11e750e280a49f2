#include "nfkit/tpoly.hpp"

#include <algorithm>

#include "nfkit/error.hpp"

namespace nfkit {

TJet TJet::t_term(int k, const Jet& c) {
    TJet r(c.nvars(), c.trunc());
    r.add_coeff(k, c);
    return r;
}

Jet TJet::coeff(int k) const {
    auto it = coeffs_.find(k);
    return it == coeffs_.end() ? Jet(nvars_, trunc_) : it->second;
}

void TJet::add_coeff(int k, const Jet& c) {
    if (c.nvars() != nvars_ || c.trunc() != trunc_)
        fail(ErrorCode::DimensionMismatch, "t-jet coefficient lives in a different jet space");
    if (c.is_zero()) return;
    auto it = coeffs_.find(k);
    if (it == coeffs_.end())
        coeffs_.emplace(k, c);
    else {
        it->second += c;
        if (it->second.is_zero()) coeffs_.erase(it);
    }
}

int TJet::space_order() const {
    int o = trunc_ + 1;
    for (const auto& [k, c] : coeffs_) o = std::min(o, c.order());
    return o;
}

Jet TJet::at_one() const {
    Jet r(nvars_, trunc_);
    for (const auto& [k, c] : coeffs_) r += c;
    return r;
}

Jet TJet::at(const Scalar& t) const {
    Jet r(nvars_, trunc_);
    Scalar p(1);
    int last = 0;
    for (const auto& [k, c] : coeffs_) {
        for (; last < k; ++last) p = p * t;
        r += p * c;
    }
    return r;
}

TJet TJet::integrate_t() const {
    TJet r(nvars_, trunc_);
    for (const auto& [k, c] : coeffs_) r.add_coeff(k + 1, Scalar(1, k + 1) * c);
    return r;
}

TJet TJet::operator-() const {
    TJet r(nvars_, trunc_);
    for (const auto& [k, c] : coeffs_) r.coeffs_.emplace(k, -c);
    return r;
}

static void require_like_tjets(const TJet& a, const TJet& b) {
    if (a.nvars() != b.nvars() || a.trunc() != b.trunc())
        fail(ErrorCode::DimensionMismatch, "t-jets live in different jet spaces");
}

TJet operator+(const TJet& a, const TJet& b) {
    require_like_tjets(a, b);
    TJet r = a;
    for (const auto& [k, c] : b.coeffs()) r.add_coeff(k, c);
    return r;
}

TJet operator-(const TJet& a, const TJet& b) {
    require_like_tjets(a, b);
    TJet r = a;
    for (const auto& [k, c] : b.coeffs()) r.add_coeff(k, -c);
    return r;
}

TJet operator*(const TJet& a, const TJet& b) {
    require_like_tjets(a, b);
    TJet r(a.nvars(), a.trunc());
    for (const auto& [ka, ca] : a.coeffs())
        for (const auto& [kb, cb] : b.coeffs()) r.add_coeff(ka + kb, ca * cb);
    return r;
}

TJet operator*(const Scalar& c, const TJet& a) {
    TJet r(a.nvars(), a.trunc());
    for (const auto& [k, cf] : a.coeffs()) r.add_coeff(k, c * cf);
    return r;
}

TJet operator*(const Jet& f, const TJet& a) {
    TJet r(a.nvars(), a.trunc());
    for (const auto& [k, cf] : a.coeffs()) r.add_coeff(k, f * cf);
    return r;
}

TJet tjet_partial(const TJet& f, int i) {
    TJet r(f.nvars(), f.trunc());
    for (const auto& [k, c] : f.coeffs()) r.add_coeff(k, jet_partial(c, i));
    return r;
}

TJet tjet_integrate(const TJet& f, int i) {
    TJet r(f.nvars(), f.trunc());
    for (const auto& [k, c] : f.coeffs()) r.add_coeff(k, jet_integrate(c, i));
    return r;
}

TJet tjet_reciprocal(const TJet& q) {
    Jet q0 = q.coeff(0);
    if (q0.constant_term().is_zero()) fail(ErrorCode::NotAUnit, "t-jet has no invertible t^0 part");
    Jet q0inv = unit_function(q0, UnitKind::Reciprocal);
    TJet rest = q - TJet::from_jet(q0);
    if (!rest.is_zero() && rest.space_order() < 1)
        fail(ErrorCode::NotAUnit, "t-dependent part must vanish at the origin");
    // q^-1 = q0^-1 sum_k (-q0^-1 rest)^k; terminates since rest has positive
    // space order in every t coefficient.
    TJet seed = (-q0inv) * rest;
    TJet acc = TJet::from_jet(q0inv);
    TJet pw = TJet::from_jet(q0inv);
    for (int k = 1; k <= q.trunc() && !pw.is_zero(); ++k) {
        pw = seed * pw;
        acc += pw;
    }
    return acc;
}

TJet tjet_compose(const Jet& f, const std::vector<TJet>& comps) {
    int n = f.nvars(), N = f.trunc();
    if (static_cast<int>(comps.size()) != n)
        fail(ErrorCode::DimensionMismatch, "composition needs one t-jet per variable");
    for (const TJet& g : comps) {
        if (g.nvars() != n || g.trunc() != N)
            fail(ErrorCode::DimensionMismatch, "composition arguments live in a different jet space");
        for (const auto& [k, c] : g.coeffs())
            if (!c.constant_term().is_zero())
                fail(ErrorCode::ConstantTermNonzero, "composition argument has a constant term");
    }
    std::vector<std::vector<TJet>> powers(static_cast<std::size_t>(n));
    auto power = [&](int j, unsigned e) -> const TJet& {
        auto& cache = powers[static_cast<std::size_t>(j)];
        if (cache.empty()) cache.push_back(TJet::from_jet(Jet::one(n, N)));
        while (cache.size() <= e) cache.push_back(cache.back() * comps[static_cast<std::size_t>(j)]);
        return cache[e];
    };
    TJet r(n, N);
    for (const auto& [m, coef] : f.terms()) {
        TJet term = TJet::from_jet(Jet::constant(n, N, coef));
        for (int j = 0; j < n; ++j)
            if (m.e[static_cast<std::size_t>(j)] > 0) term = term * power(j, m.e[static_cast<std::size_t>(j)]);
        r += term;
    }
    return r;
}

TFieldJet::TFieldJet(const VectorFieldJet& X) : nvars(X.nvars), trunc(X.trunc) {
    comps.reserve(static_cast<std::size_t>(nvars));
    for (int i = 0; i < nvars; ++i) comps.push_back(TJet::from_jet(X.comp(i)));
}

int TFieldJet::space_order() const {
    int o = trunc + 1;
    for (const TJet& c : comps) o = std::min(o, c.space_order());
    return o;
}

FormalMap time1_flow(const TFieldJet& X) {
    int n = X.nvars, N = X.trunc;
    if (X.space_order() < 2)
        fail(ErrorCode::OrderTooLow, "flow generator must vanish to second order");
    std::vector<TJet> id;
    id.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) id.push_back(TJet::from_jet(Jet::variable(n, N, i)));
    std::vector<TJet> phi = id;
    for (int step = 0; step <= N + 1; ++step) {
        std::vector<TJet> next;
        next.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            TJet rhs(n, N);
            for (const auto& [k, c] : X.comp(i).coeffs())
                rhs += TJet::t_term(k, Jet::one(n, N)) * tjet_compose(c, phi);
            next.push_back(id[static_cast<std::size_t>(i)] + rhs.integrate_t());
        }
        bool stable = true;
        for (int i = 0; i < n; ++i)
            if (next[static_cast<std::size_t>(i)] != phi[static_cast<std::size_t>(i)]) stable = false;
        phi = std::move(next);
        if (stable) break;
        if (step == N + 1) fail(ErrorCode::Internal, "flow iteration did not stabilize");
    }
    std::vector<Jet> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(phi[static_cast<std::size_t>(i)].at_one());
    return FormalMap(std::move(out));
}

FormalMap time1_flow(const VectorFieldJet& X) { return time1_flow(TFieldJet(X)); }

} // namespace nfkit
