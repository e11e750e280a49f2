#include "nfkit/jet.hpp"

#include <sstream>

namespace nfkit {

Jet::Jet(int nvars, int trunc) : nvars_(nvars), trunc_(trunc) {
    if (nvars < 1 || trunc < 0) fail(ErrorCode::DimensionMismatch, "bad jet parameters");
}

Jet Jet::constant(int nvars, int trunc, const Scalar& c) {
    Jet j(nvars, trunc);
    j.set(Monomial(nvars), c);
    return j;
}

Jet Jet::variable(int nvars, int trunc, int i) {
    Jet j(nvars, trunc);
    Monomial m(nvars);
    m.e[static_cast<std::size_t>(i)] = 1;
    j.set(m, Scalar(1));
    return j;
}

Jet Jet::term(int nvars, int trunc, const Monomial& m, const Scalar& c) {
    Jet j(nvars, trunc);
    j.set(m, c);
    return j;
}

Scalar Jet::coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Scalar(0) : it->second;
}

int Jet::order() const {
    if (terms_.empty()) return trunc_ + 1;
    return terms_.begin()->first.degree();
}

Jet Jet::truncated(int d) const {
    Jet r(nvars_, trunc_);
    for (const auto& [m, c] : terms_)
        if (m.degree() <= d) r.terms_.emplace(m, c);
    return r;
}

Jet Jet::graded_part(int d) const {
    Jet r(nvars_, trunc_);
    for (const auto& [m, c] : terms_)
        if (m.degree() == d) r.terms_.emplace(m, c);
    return r;
}

void Jet::set(const Monomial& m, const Scalar& c) {
    if (m.nvars() != nvars_) fail(ErrorCode::DimensionMismatch, "monomial arity");
    if (m.degree() > trunc_) return;
    if (c.is_zero())
        terms_.erase(m);
    else
        terms_[m] = c;
}

void Jet::add_term(const Monomial& m, const Scalar& c) {
    if (m.nvars() != nvars_) fail(ErrorCode::DimensionMismatch, "monomial arity");
    if (m.degree() > trunc_ || c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Jet Jet::operator-() const {
    Jet r(nvars_, trunc_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

void require_compatible(const Jet& a, const Jet& b) {
    if (a.nvars() != b.nvars() || a.trunc() != b.trunc())
        fail(ErrorCode::DimensionMismatch, "jets have different nvars or truncation degree");
}

Jet operator+(const Jet& a, const Jet& b) {
    require_compatible(a, b);
    Jet r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
}

Jet operator-(const Jet& a, const Jet& b) {
    require_compatible(a, b);
    Jet r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    require_compatible(a, b);
    Jet r(a.nvars_, a.trunc_);
    for (const auto& [ma, ca] : a.terms_) {
        int da = ma.degree();
        for (const auto& [mb, cb] : b.terms_) {
            if (da + mb.degree() > a.trunc_) break; // grlex map: degrees ascend
            r.add_term(ma * mb, ca * cb);
        }
    }
    return r;
}

Jet operator*(const Scalar& c, const Jet& a) {
    Jet r(a.nvars_, a.trunc_);
    if (c.is_zero()) return r;
    for (const auto& [m, cc] : a.terms_) r.terms_.emplace(m, c * cc);
    return r;
}

std::string Jet::str(const std::vector<std::string>& var_names) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) out << " + ";
        first = false;
        out << "(" << c.str() << ")";
        for (int j = 0; j < nvars_; ++j) {
            unsigned e = m.e[static_cast<std::size_t>(j)];
            if (e == 0) continue;
            out << "*";
            if (var_names.empty())
                out << "x" << (j + 1);
            else
                out << var_names[static_cast<std::size_t>(j)];
            if (e > 1) out << "^" << e;
        }
    }
    return out.str();
}

FormalMap::FormalMap(int nvars, int trunc) : nvars_(nvars), trunc_(trunc) {
    comps_.assign(static_cast<std::size_t>(nvars), Jet(nvars, trunc));
}

FormalMap::FormalMap(std::vector<Jet> comps) : comps_(std::move(comps)) {
    if (comps_.empty()) fail(ErrorCode::DimensionMismatch, "empty map");
    nvars_ = comps_[0].nvars();
    trunc_ = comps_[0].trunc();
    if (static_cast<int>(comps_.size()) != nvars_)
        fail(ErrorCode::DimensionMismatch, "component count differs from nvars");
    for (const auto& c : comps_) {
        require_compatible(c, comps_[0]);
        if (!c.constant_term().is_zero())
            fail(ErrorCode::ConstantTermNonzero, "formal map component has constant term");
    }
}

FormalMap FormalMap::identity(int nvars, int trunc) {
    FormalMap phi(nvars, trunc);
    for (int j = 0; j < nvars; ++j) phi.comps_[static_cast<std::size_t>(j)] = Jet::variable(nvars, trunc, j);
    return phi;
}

FormalMap FormalMap::linear(int trunc, const std::vector<std::vector<Scalar>>& A) {
    int n = static_cast<int>(A.size());
    FormalMap phi(n, trunc);
    for (int r = 0; r < n; ++r) {
        if (static_cast<int>(A[static_cast<std::size_t>(r)].size()) != n)
            fail(ErrorCode::DimensionMismatch, "linear part not square");
        Jet c(n, trunc);
        for (int j = 0; j < n; ++j) {
            Monomial m(n);
            m.e[static_cast<std::size_t>(j)] = 1;
            c.add_term(m, A[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]);
        }
        phi.comps_[static_cast<std::size_t>(r)] = c;
    }
    return phi;
}

std::vector<std::vector<Scalar>> FormalMap::linear_part() const {
    std::vector<std::vector<Scalar>> A(static_cast<std::size_t>(nvars_),
                                       std::vector<Scalar>(static_cast<std::size_t>(nvars_), Scalar(0)));
    for (int r = 0; r < nvars_; ++r)
        for (int j = 0; j < nvars_; ++j) {
            Monomial m(nvars_);
            m.e[static_cast<std::size_t>(j)] = 1;
            A[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] = comps_[static_cast<std::size_t>(r)].coeff(m);
        }
    return A;
}

bool FormalMap::is_identity() const { return *this == identity(nvars_, trunc_); }

Jet jet_compose(const Jet& f, const std::vector<Jet>& comps) {
    if (static_cast<int>(comps.size()) != f.nvars())
        fail(ErrorCode::DimensionMismatch, "compose arity");
    for (const auto& c : comps) {
        if (c.trunc() != f.trunc())
            fail(ErrorCode::DimensionMismatch, "compose truncation");
        if (!c.constant_term().is_zero())
            fail(ErrorCode::ConstantTermNonzero, "substitution has constant term");
    }
    int n = comps.empty() ? 0 : comps[0].nvars();
    int N = f.trunc();
    Jet result(n, N);
    std::vector<std::vector<Jet>> powers(static_cast<std::size_t>(f.nvars()), {Jet::one(n, N)});
    auto power = [&](int j, unsigned e) -> const Jet& {
        auto& cache = powers[static_cast<std::size_t>(j)];
        while (cache.size() <= e) cache.push_back(cache.back() * comps[static_cast<std::size_t>(j)]);
        return cache[e];
    };
    for (const auto& [m, c] : f.terms()) {
        Jet prod = Jet::one(n, N);
        for (int j = 0; j < f.nvars(); ++j) {
            unsigned e = m.e[static_cast<std::size_t>(j)];
            if (e > 0) prod *= power(j, e);
        }
        result += c * prod;
    }
    return result;
}

Jet jet_compose(const Jet& f, const FormalMap& phi) { return jet_compose(f, phi.comps()); }

FormalMap map_compose(const FormalMap& phi, const FormalMap& psi) {
    if (phi.nvars() != psi.nvars() || phi.trunc() != psi.trunc())
        fail(ErrorCode::DimensionMismatch, "map compose");
    std::vector<Jet> comps;
    comps.reserve(static_cast<std::size_t>(phi.nvars()));
    for (int r = 0; r < phi.nvars(); ++r) comps.push_back(jet_compose(phi.comp(r), psi));
    return FormalMap(std::move(comps));
}

namespace {

// Inverse of a small matrix over Q(i) by Gauss-Jordan; nullopt if singular.
std::optional<std::vector<std::vector<Scalar>>> invert_matrix(std::vector<std::vector<Scalar>> A) {
    std::size_t n = A.size();
    std::vector<std::vector<Scalar>> inv(n, std::vector<Scalar>(n, Scalar(0)));
    for (std::size_t r = 0; r < n; ++r) inv[r][r] = Scalar(1);
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
            Scalar factor = A[r][col];
            for (std::size_t j = 0; j < n; ++j) {
                A[r][j] -= factor * A[col][j];
                inv[r][j] -= factor * inv[col][j];
            }
        }
    }
    return inv;
}

} // namespace

FormalMap map_inverse(const FormalMap& phi) {
    auto inv = invert_matrix(phi.linear_part());
    if (!inv) fail(ErrorCode::SingularLinearPart, "formal map has singular linear part");
    int n = phi.nvars(), N = phi.trunc();
    FormalMap Binv = FormalMap::linear(N, *inv);
    // Nonlinear part of phi.
    std::vector<Jet> nl;
    nl.reserve(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) nl.push_back(phi.comp(r) - phi.comp(r).truncated(1));
    FormalMap psi = Binv;
    for (int iter = 1; iter < N; ++iter) {
        // psi <- Binv o (id - nl o psi); gains one exact degree per pass.
        std::vector<Jet> shifted;
        shifted.reserve(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r)
            shifted.push_back(Jet::variable(n, N, r) - jet_compose(nl[static_cast<std::size_t>(r)], psi));
        psi = map_compose(Binv, FormalMap(std::move(shifted)));
    }
    return psi;
}

Jet jet_partial(const Jet& f, int i) {
    Jet r(f.nvars(), f.trunc());
    for (const auto& [m, c] : f.terms()) {
        unsigned e = m.e[static_cast<std::size_t>(i)];
        if (e == 0) continue;
        Monomial d = m;
        d.e[static_cast<std::size_t>(i)] = e - 1;
        r.add_term(d, Scalar(static_cast<long>(e)) * c);
    }
    return r;
}

Jet jet_integrate(const Jet& f, int i) {
    Jet r(f.nvars(), f.trunc());
    for (const auto& [m, c] : f.terms()) {
        Monomial u = m;
        unsigned e = ++u.e[static_cast<std::size_t>(i)];
        r.add_term(u, c / Scalar(static_cast<long>(e)));
    }
    return r;
}

Jet divide_exact(const Jet& f, const Jet& g) {
    require_compatible(f, g);
    if (g.is_zero()) fail(ErrorCode::NotDivisible, "division by zero jet");
    const auto& lead = *g.terms().begin();
    Jet q(f.nvars(), f.trunc());
    Jet rem = f;
    while (!rem.is_zero()) {
        const auto& [m, c] = *rem.terms().begin();
        if (!lead.first.divides(m))
            fail(ErrorCode::NotDivisible, "no truncated quotient exists");
        Monomial qm = m / lead.first;
        Scalar qc = c / lead.second;
        q.add_term(qm, qc);
        rem -= Jet::term(f.nvars(), f.trunc(), qm, qc) * g;
    }
    return q;
}

Jet unit_function(const Jet& u, UnitKind kind) {
    int n = u.nvars(), N = u.trunc();
    Scalar c = u.constant_term();
    switch (kind) {
    case UnitKind::Reciprocal: {
        if (c.is_zero()) fail(ErrorCode::NotAUnit, "reciprocal of non-unit");
        Jet v = Scalar(1) / c * u - Jet::one(n, N);
        Jet acc = Jet::one(n, N), pw = Jet::one(n, N);
        for (int k = 1; k <= N; ++k) {
            pw *= -v;
            acc += pw;
        }
        return Scalar(1) / c * acc;
    }
    case UnitKind::Sqrt: {
        if (c.is_zero()) fail(ErrorCode::NotAUnit, "sqrt of non-unit");
        auto s = scalar_sqrt(c);
        if (!s) fail(ErrorCode::PerfectSquareRequired, "constant term has no square root in Q(i)");
        Jet v = Scalar(1) / c * u - Jet::one(n, N);
        Jet acc = Jet::one(n, N), pw = Jet::one(n, N);
        Scalar binom(1); // binomial(1/2, k)
        for (int k = 1; k <= N; ++k) {
            pw *= v;
            binom *= (Scalar(1, 2) - Scalar(k - 1)) / Scalar(k);
            acc += binom * pw;
        }
        return *s * acc;
    }
    case UnitKind::Exp: {
        if (!c.is_zero()) fail(ErrorCode::NotAUnit, "exp requires zero constant term");
        Jet acc = Jet::one(n, N), pw = Jet::one(n, N);
        Scalar fact(1);
        for (int k = 1; k <= N; ++k) {
            pw *= u;
            fact *= Scalar(k);
            acc += Scalar(1) / fact * pw;
        }
        return acc;
    }
    case UnitKind::Log: {
        if (c != Scalar(1)) fail(ErrorCode::NotAUnit, "log requires constant term 1");
        Jet v = u - Jet::one(n, N);
        Jet acc(n, N), pw = Jet::one(n, N);
        for (int k = 1; k <= N; ++k) {
            pw *= v;
            Scalar coefficient = Scalar((k % 2 == 1) ? 1 : -1) / Scalar(k);
            acc += coefficient * pw;
        }
        return acc;
    }
    }
    fail(ErrorCode::Internal, "unreachable");
}

} // namespace nfkit
