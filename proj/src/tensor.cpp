#include "nfkit/tensor.hpp"

#include <algorithm>
#include <sstream>

#include "nfkit/error.hpp"

namespace nfkit {

VectorFieldJet::VectorFieldJet(std::vector<Jet> c)
    : nvars(c.empty() ? 0 : c.front().nvars()), trunc(c.empty() ? 0 : c.front().trunc()), comps(std::move(c)) {
    if (static_cast<int>(comps.size()) != nvars)
        fail(ErrorCode::DimensionMismatch, "vector field needs one component per variable");
    for (const Jet& f : comps)
        if (f.nvars() != nvars || f.trunc() != trunc)
            fail(ErrorCode::DimensionMismatch, "mixed jet spaces in vector field");
}

bool VectorFieldJet::is_zero() const {
    for (const Jet& f : comps)
        if (!f.is_zero()) return false;
    return true;
}

bool VectorFieldJet::vanishes_at_origin() const {
    for (const Jet& f : comps)
        if (!f.constant_term().is_zero()) return false;
    return true;
}

int VectorFieldJet::order() const {
    int o = trunc + 1;
    for (const Jet& f : comps) o = std::min(o, f.order());
    return o;
}

Mat VectorFieldJet::linear_part() const {
    Mat A(static_cast<std::size_t>(nvars), Vec(static_cast<std::size_t>(nvars), Scalar(0)));
    for (int i = 0; i < nvars; ++i)
        for (int j = 0; j < nvars; ++j) {
            Monomial m(nvars);
            m.e[static_cast<std::size_t>(j)] = 1;
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = comps[static_cast<std::size_t>(i)].coeff(m);
        }
    return A;
}

VectorFieldJet VectorFieldJet::graded_part(int d) const {
    VectorFieldJet r(nvars, trunc);
    for (int i = 0; i < nvars; ++i) r.comp(i) = comps[static_cast<std::size_t>(i)].graded_part(d);
    return r;
}

VectorFieldJet VectorFieldJet::truncated(int d) const {
    VectorFieldJet r(nvars, trunc);
    for (int i = 0; i < nvars; ++i) r.comp(i) = comps[static_cast<std::size_t>(i)].truncated(d);
    return r;
}

Jet VectorFieldJet::apply(const Jet& f) const {
    if (f.nvars() != nvars || f.trunc() != trunc)
        fail(ErrorCode::DimensionMismatch, "vector field and function live in different jet spaces");
    Jet r(nvars, trunc);
    for (int i = 0; i < nvars; ++i) r += comps[static_cast<std::size_t>(i)] * jet_partial(f, i);
    return r;
}

VectorFieldJet VectorFieldJet::operator-() const {
    VectorFieldJet r(nvars, trunc);
    for (int i = 0; i < nvars; ++i) r.comp(i) = -comps[static_cast<std::size_t>(i)];
    return r;
}

static void require_like_fields(const VectorFieldJet& a, const VectorFieldJet& b) {
    if (a.nvars != b.nvars || a.trunc != b.trunc)
        fail(ErrorCode::DimensionMismatch, "vector fields live in different jet spaces");
}

VectorFieldJet operator+(const VectorFieldJet& a, const VectorFieldJet& b) {
    require_like_fields(a, b);
    VectorFieldJet r(a.nvars, a.trunc);
    for (int i = 0; i < a.nvars; ++i) r.comp(i) = a.comp(i) + b.comp(i);
    return r;
}

VectorFieldJet operator-(const VectorFieldJet& a, const VectorFieldJet& b) {
    require_like_fields(a, b);
    VectorFieldJet r(a.nvars, a.trunc);
    for (int i = 0; i < a.nvars; ++i) r.comp(i) = a.comp(i) - b.comp(i);
    return r;
}

VectorFieldJet operator*(const Scalar& c, const VectorFieldJet& a) {
    VectorFieldJet r(a.nvars, a.trunc);
    for (int i = 0; i < a.nvars; ++i) r.comp(i) = c * a.comp(i);
    return r;
}

VectorFieldJet operator*(const Jet& f, const VectorFieldJet& a) {
    VectorFieldJet r(a.nvars, a.trunc);
    for (int i = 0; i < a.nvars; ++i) r.comp(i) = f * a.comp(i);
    return r;
}

VectorFieldJet VectorFieldJet::linear(int trunc, const Mat& A) {
    int n = static_cast<int>(A.size());
    VectorFieldJet r(n, trunc);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Monomial m(n);
            m.e[static_cast<std::size_t>(j)] = 1;
            r.comp(i).add_term(m, A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        }
    return r;
}

VectorFieldJet VectorFieldJet::diagonal(int trunc, const std::vector<Scalar>& gamma) {
    int n = static_cast<int>(gamma.size());
    VectorFieldJet r(n, trunc);
    for (int i = 0; i < n; ++i)
        r.comp(i) = gamma[static_cast<std::size_t>(i)] * Jet::variable(n, trunc, i);
    return r;
}

std::string VectorFieldJet::str() const {
    std::ostringstream os;
    for (int i = 0; i < nvars; ++i) {
        if (i) os << " ; ";
        os << "(" << comps[static_cast<std::size_t>(i)].str() << ") D" << (i + 1);
    }
    return os.str();
}

int sort_index_tuple(IndexTuple& idx) {
    int sign = 1;
    for (std::size_t a = 1; a < idx.size(); ++a)
        for (std::size_t b = a; b > 0 && idx[b] < idx[b - 1]; --b) {
            std::swap(idx[b], idx[b - 1]);
            sign = -sign;
        }
    for (std::size_t a = 1; a < idx.size(); ++a)
        if (idx[a] == idx[a - 1]) return 0;
    return sign;
}

template <Variance V>
Jet AltTensor<V>::comp(IndexTuple idx) const {
    int sign = sort_index_tuple(idx);
    if (sign == 0) return Jet(nvars_, trunc_);
    auto it = comps_.find(idx);
    if (it == comps_.end()) return Jet(nvars_, trunc_);
    return sign == 1 ? it->second : -it->second;
}

template <Variance V>
void AltTensor<V>::add(IndexTuple idx, const Jet& c) {
    if (static_cast<int>(idx.size()) != degree_)
        fail(ErrorCode::DimensionMismatch, "index tuple length does not match tensor degree");
    for (int i : idx)
        if (i < 0 || i >= nvars_) fail(ErrorCode::DimensionMismatch, "tensor index out of range");
    if (c.nvars() != nvars_ || c.trunc() != trunc_)
        fail(ErrorCode::DimensionMismatch, "tensor coefficient lives in a different jet space");
    int sign = sort_index_tuple(idx);
    if (sign == 0 || c.is_zero()) return;
    auto it = comps_.find(idx);
    if (it == comps_.end())
        comps_.emplace(idx, sign == 1 ? c : -c);
    else {
        it->second = sign == 1 ? it->second + c : it->second - c;
        if (it->second.is_zero()) comps_.erase(it);
    }
}

template <Variance V>
void AltTensor<V>::set_sorted(const IndexTuple& idx, const Jet& c) {
    if (static_cast<int>(idx.size()) != degree_)
        fail(ErrorCode::DimensionMismatch, "index tuple length does not match tensor degree");
    if (c.is_zero())
        comps_.erase(idx);
    else
        comps_.insert_or_assign(idx, c);
}

template <Variance V>
void AltTensor<V>::prune() {
    for (auto it = comps_.begin(); it != comps_.end();)
        it = it->second.is_zero() ? comps_.erase(it) : std::next(it);
}

template <Variance V>
int AltTensor<V>::coeff_order() const {
    int o = trunc_ + 1;
    for (const auto& [idx, c] : comps_) o = std::min(o, c.order());
    return o;
}

template <Variance V>
AltTensor<V> AltTensor<V>::truncated(int d) const {
    AltTensor r(nvars_, trunc_, degree_);
    for (const auto& [idx, c] : comps_) r.set_sorted(idx, c.truncated(d));
    return r;
}

template <Variance V>
AltTensor<V> AltTensor<V>::graded_part(int d) const {
    AltTensor r(nvars_, trunc_, degree_);
    for (const auto& [idx, c] : comps_) r.set_sorted(idx, c.graded_part(d));
    return r;
}

template <Variance V>
AltTensor<V> AltTensor<V>::operator-() const {
    AltTensor r(nvars_, trunc_, degree_);
    for (const auto& [idx, c] : comps_) r.set_sorted(idx, -c);
    return r;
}

template <Variance V>
void AltTensor<V>::require_like(const AltTensor& o) const {
    if (nvars_ != o.nvars_ || trunc_ != o.trunc_ || degree_ != o.degree_)
        fail(ErrorCode::DimensionMismatch, "tensors live in different spaces");
}

template <Variance V>
std::string AltTensor<V>::str() const {
    std::ostringstream os;
    bool first = true;
    const char* sym = V == Variance::Covariant ? "dx" : "Dx";
    for (const auto& [idx, c] : comps_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        for (std::size_t a = 0; a < idx.size(); ++a) os << (a ? "^" : " ") << sym << (idx[a] + 1);
    }
    if (first) os << "0";
    return os.str();
}

template class AltTensor<Variance::Covariant>;
template class AltTensor<Variance::Contravariant>;

FormJet form_zero(int nvars, int trunc, int degree) { return FormJet(nvars, trunc, degree); }

FormJet form_dx(int nvars, int trunc, int i) {
    FormJet w(nvars, trunc, 1);
    w.add({i}, Jet::one(nvars, trunc));
    return w;
}

MultiVectorJet mv_basis(int nvars, int trunc, int i) {
    MultiVectorJet w(nvars, trunc, 1);
    w.add({i}, Jet::one(nvars, trunc));
    return w;
}

MultiVectorJet mv_from_field(const VectorFieldJet& X) {
    MultiVectorJet w(X.nvars, X.trunc, 1);
    for (int i = 0; i < X.nvars; ++i) w.add({i}, X.comp(i));
    return w;
}

VectorFieldJet field_from_mv(const MultiVectorJet& W) {
    if (W.degree() != 1) fail(ErrorCode::DimensionMismatch, "expected a 1-vector");
    VectorFieldJet X(W.nvars(), W.trunc());
    for (const auto& [idx, c] : W.comps()) X.comp(idx[0]) = c;
    return X;
}

template <Variance V>
AltTensor<V> wedge(const AltTensor<V>& a, const AltTensor<V>& b) {
    if (a.nvars() != b.nvars() || a.trunc() != b.trunc())
        fail(ErrorCode::DimensionMismatch, "tensors live in different spaces");
    AltTensor<V> r(a.nvars(), a.trunc(), a.degree() + b.degree());
    for (const auto& [ia, ca] : a.comps())
        for (const auto& [ib, cb] : b.comps()) {
            IndexTuple idx = ia;
            idx.insert(idx.end(), ib.begin(), ib.end());
            r.add(std::move(idx), ca * cb);
        }
    return r;
}

template FormJet wedge<Variance::Covariant>(const FormJet&, const FormJet&);
template MultiVectorJet wedge<Variance::Contravariant>(const MultiVectorJet&, const MultiVectorJet&);

FormJet exterior_d(const FormJet& w) {
    FormJet r(w.nvars(), w.trunc(), w.degree() + 1);
    for (const auto& [idx, c] : w.comps())
        for (int j = 0; j < w.nvars(); ++j) {
            Jet dc = jet_partial(c, j);
            if (dc.is_zero()) continue;
            IndexTuple ext;
            ext.reserve(idx.size() + 1);
            ext.push_back(j);
            ext.insert(ext.end(), idx.begin(), idx.end());
            r.add(std::move(ext), dc);
        }
    return r;
}

FormJet exterior_d(const Jet& f) {
    FormJet r(f.nvars(), f.trunc(), 1);
    for (int j = 0; j < f.nvars(); ++j) r.add({j}, jet_partial(f, j));
    return r;
}

FormJet interior_product(const VectorFieldJet& X, const FormJet& w) {
    if (X.nvars != w.nvars() || X.trunc != w.trunc())
        fail(ErrorCode::DimensionMismatch, "field and form live in different jet spaces");
    if (w.degree() == 0) return FormJet(w.nvars(), w.trunc(), 0);
    FormJet r(w.nvars(), w.trunc(), w.degree() - 1);
    for (const auto& [idx, c] : w.comps())
        for (std::size_t a = 0; a < idx.size(); ++a) {
            Jet term = X.comp(idx[a]) * c;
            if (a % 2 == 1) term = -term;
            IndexTuple rest;
            rest.reserve(idx.size() - 1);
            for (std::size_t b = 0; b < idx.size(); ++b)
                if (b != a) rest.push_back(idx[b]);
            r.add(std::move(rest), term);
        }
    return r;
}

VectorFieldJet lie_bracket(const VectorFieldJet& X, const VectorFieldJet& Y) {
    require_like_fields(X, Y);
    VectorFieldJet r(X.nvars, X.trunc);
    for (int i = 0; i < X.nvars; ++i) r.comp(i) = X.apply(Y.comp(i)) - Y.apply(X.comp(i));
    return r;
}

FormJet lie_derivative(const VectorFieldJet& X, const FormJet& w) {
    return exterior_d(interior_product(X, w)) + interior_product(X, exterior_d(w));
}

MultiVectorJet lie_derivative(const VectorFieldJet& X, const MultiVectorJet& w) {
    if (X.nvars != w.nvars() || X.trunc != w.trunc())
        fail(ErrorCode::DimensionMismatch, "field and multivector live in different jet spaces");
    MultiVectorJet r(w.nvars(), w.trunc(), w.degree());
    for (const auto& [idx, c] : w.comps()) {
        r.add(idx, X.apply(c));
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (int l = 0; l < w.nvars(); ++l) {
                Jet d = jet_partial(X.comp(l), idx[a]);
                if (d.is_zero()) continue;
                IndexTuple repl = idx;
                repl[a] = l;
                r.add(std::move(repl), -(c * d));
            }
    }
    return r;
}

std::vector<std::vector<Jet>> jacobian(const FormalMap& phi) {
    int n = phi.nvars();
    std::vector<std::vector<Jet>> J(static_cast<std::size_t>(n),
                                    std::vector<Jet>(static_cast<std::size_t>(n), Jet(n, phi.trunc())));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = jet_partial(phi.comp(i), j);
    return J;
}

FormJet pullback(const FormalMap& phi, const FormJet& w) {
    if (phi.nvars() != w.nvars() || phi.trunc() != w.trunc())
        fail(ErrorCode::DimensionMismatch, "map and form live in different jet spaces");
    int n = w.nvars(), N = w.trunc();
    if (w.degree() == 0) {
        FormJet r(n, N, 0);
        for (const auto& [idx, c] : w.comps()) r.add(idx, jet_compose(c, phi));
        return r;
    }
    std::vector<FormJet> dphi;
    dphi.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) dphi.push_back(exterior_d(phi.comp(j)));
    FormJet r(n, N, w.degree());
    for (const auto& [idx, c] : w.comps()) {
        FormJet prod = dphi[static_cast<std::size_t>(idx[0])];
        for (std::size_t a = 1; a < idx.size(); ++a)
            prod = wedge(prod, dphi[static_cast<std::size_t>(idx[a])]);
        r = r + jet_compose(c, phi) * prod;
    }
    return r;
}

VectorFieldJet pushforward(const FormalMap& phi, const VectorFieldJet& X) {
    if (phi.nvars() != X.nvars || phi.trunc() != X.trunc)
        fail(ErrorCode::DimensionMismatch, "map and field live in different jet spaces");
    FormalMap inv = map_inverse(phi);
    auto J = jacobian(phi);
    VectorFieldJet r(X.nvars, X.trunc);
    for (int i = 0; i < X.nvars; ++i) {
        Jet s(X.nvars, X.trunc);
        for (int j = 0; j < X.nvars; ++j)
            s += J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * X.comp(j);
        r.comp(i) = jet_compose(s, inv);
    }
    return r;
}

MultiVectorJet pushforward(const FormalMap& phi, const MultiVectorJet& W) {
    if (phi.nvars() != W.nvars() || phi.trunc() != W.trunc())
        fail(ErrorCode::DimensionMismatch, "map and multivector live in different jet spaces");
    int n = W.nvars(), N = W.trunc();
    FormalMap inv = map_inverse(phi);
    if (W.degree() == 0) {
        MultiVectorJet r(n, N, 0);
        for (const auto& [idx, c] : W.comps()) r.add(idx, jet_compose(c, inv));
        return r;
    }
    auto J = jacobian(phi);
    std::vector<MultiVectorJet> cols;
    cols.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        MultiVectorJet col(n, N, 1);
        for (int i = 0; i < n; ++i) col.add({i}, J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        cols.push_back(std::move(col));
    }
    MultiVectorJet acc(n, N, W.degree());
    for (const auto& [idx, c] : W.comps()) {
        MultiVectorJet prod = cols[static_cast<std::size_t>(idx[0])];
        for (std::size_t a = 1; a < idx.size(); ++a)
            prod = wedge(prod, cols[static_cast<std::size_t>(idx[a])]);
        acc = acc + c * prod;
    }
    MultiVectorJet r(n, N, W.degree());
    for (const auto& [idx, c] : acc.comps()) r.set_sorted(idx, jet_compose(c, inv));
    return r;
}

FormJet transport(const FormalMap& phi, const FormJet& w) { return pullback(map_inverse(phi), w); }

FormJet poincare_primitive(const FormJet& w) {
    if (w.degree() < 1) fail(ErrorCode::DimensionMismatch, "primitive of a 0-form is undefined");
    if (!exterior_d(w).all_zero()) fail(ErrorCode::NotClosed, "form is not closed");
    VectorFieldJet euler(w.nvars(), w.trunc());
    for (int i = 0; i < w.nvars(); ++i) euler.comp(i) = Jet::variable(w.nvars(), w.trunc(), i);
    FormJet contracted = interior_product(euler, w);
    FormJet r(w.nvars(), w.trunc(), w.degree() - 1);
    for (const auto& [idx, c] : contracted.comps()) {
        Jet scaled(w.nvars(), w.trunc());
        for (const auto& [m, coef] : c.terms())
            scaled.add_term(m, Scalar(1, static_cast<long>(m.degree() - 1 + w.degree())) * coef);
        r.add(idx, scaled);
    }
    return r;
}

// ---- Log forms.

LogFormJet::LogFormJet(std::vector<int> logs, int nvars, int trunc, int degree)
    : log_indices(std::move(logs)), regular(nvars, trunc, degree) {
    std::sort(log_indices.begin(), log_indices.end());
    log_indices.erase(std::unique(log_indices.begin(), log_indices.end()), log_indices.end());
    for (int i : log_indices) {
        if (i < 0 || i >= nvars) fail(ErrorCode::DimensionMismatch, "log index out of range");
        log_parts.emplace(i, FormJet(nvars, trunc, degree - 1));
    }
}

static void split_by_var(const Jet& c, int i, Jet& free_part, Jet& quotient) {
    free_part = Jet(c.nvars(), c.trunc());
    quotient = Jet(c.nvars(), c.trunc());
    for (const auto& [m, coef] : c.terms()) {
        if (m.e[static_cast<std::size_t>(i)] == 0)
            free_part.add_term(m, coef);
        else {
            Monomial q = m;
            q.e[static_cast<std::size_t>(i)] -= 1;
            quotient.add_term(q, coef);
        }
    }
}

void LogFormJet::canonicalize() {
    for (int i : log_indices) {
        FormJet& beta = log_parts.at(i);
        FormJet clean(nvars(), trunc(), degree() - 1);
        for (const auto& [idx, c] : beta.comps()) {
            if (std::find(idx.begin(), idx.end(), i) != idx.end()) continue;
            Jet free_part(nvars(), trunc()), quot(nvars(), trunc());
            split_by_var(c, i, free_part, quot);
            if (!quot.is_zero()) {
                IndexTuple ext;
                ext.reserve(idx.size() + 1);
                ext.push_back(i);
                ext.insert(ext.end(), idx.begin(), idx.end());
                regular.add(std::move(ext), quot);
            }
            clean.set_sorted(idx, free_part);
        }
        clean.prune();
        beta = clean;
    }
    regular.prune();
}

bool LogFormJet::all_zero() const {
    for (const auto& [i, beta] : log_parts)
        if (!beta.all_zero()) return false;
    return regular.all_zero();
}

LogFormJet LogFormJet::operator-() const {
    LogFormJet r = *this;
    for (auto& [i, beta] : r.log_parts) beta = -beta;
    r.regular = -r.regular;
    return r;
}

static std::vector<int> merged_logs(const LogFormJet& a, const LogFormJet& b) {
    std::vector<int> logs = a.log_indices;
    logs.insert(logs.end(), b.log_indices.begin(), b.log_indices.end());
    std::sort(logs.begin(), logs.end());
    logs.erase(std::unique(logs.begin(), logs.end()), logs.end());
    return logs;
}

LogFormJet operator+(const LogFormJet& a, const LogFormJet& b) {
    if (a.nvars() != b.nvars() || a.trunc() != b.trunc() || a.degree() != b.degree())
        fail(ErrorCode::DimensionMismatch, "log forms live in different spaces");
    LogFormJet r(merged_logs(a, b), a.nvars(), a.trunc(), a.degree());
    for (int i : r.log_indices) {
        FormJet s(a.nvars(), a.trunc(), a.degree() - 1);
        if (auto it = a.log_parts.find(i); it != a.log_parts.end()) s = s + it->second;
        if (auto it = b.log_parts.find(i); it != b.log_parts.end()) s = s + it->second;
        r.log_parts.at(i) = s;
    }
    r.regular = a.regular + b.regular;
    return r;
}

LogFormJet operator-(const LogFormJet& a, const LogFormJet& b) { return a + (-b); }

bool operator==(const LogFormJet& a, const LogFormJet& b) {
    if (a.nvars() != b.nvars() || a.trunc() != b.trunc() || a.degree() != b.degree()) return false;
    LogFormJet d = a - b;
    d.canonicalize();
    return d.all_zero();
}

LogFormJet log_exterior_d(const LogFormJet& w) {
    LogFormJet r(w.log_indices, w.nvars(), w.trunc(), w.degree() + 1);
    for (const auto& [i, beta] : w.log_parts) r.log_parts.at(i) = -exterior_d(beta);
    r.regular = exterior_d(w.regular);
    r.canonicalize();
    return r;
}

bool log_tangent(const VectorFieldJet& X, const std::vector<int>& log_indices) {
    for (int i : log_indices) {
        Jet free_part(X.nvars, X.trunc), quot(X.nvars, X.trunc);
        split_by_var(X.comp(i), i, free_part, quot);
        if (!free_part.is_zero()) return false;
    }
    return true;
}

LogFormJet log_interior_product(const VectorFieldJet& X, const LogFormJet& w) {
    if (X.nvars != w.nvars() || X.trunc != w.trunc())
        fail(ErrorCode::DimensionMismatch, "field and log form live in different jet spaces");
    if (w.degree() == 0) return LogFormJet(w.log_indices, w.nvars(), w.trunc(), 0);
    LogFormJet r(w.log_indices, w.nvars(), w.trunc(), w.degree() - 1);
    r.regular = interior_product(X, w.regular);
    for (const auto& [i, beta] : w.log_parts) {
        Jet free_part(X.nvars, X.trunc), quot(X.nvars, X.trunc);
        split_by_var(X.comp(i), i, free_part, quot);
        if (!free_part.is_zero())
            fail(ErrorCode::LogTangencyViolated, "field is not tangent to the divisor");
        if (w.degree() >= 2) r.log_parts.at(i) = -interior_product(X, beta);
        for (const auto& [idx, c] : beta.comps()) r.regular.add(idx, quot * c);
    }
    r.canonicalize();
    return r;
}

LogFormJet log_lie_derivative(const VectorFieldJet& X, const LogFormJet& w) {
    LogFormJet r = log_interior_product(X, log_exterior_d(w)) + log_exterior_d(log_interior_product(X, w));
    r.canonicalize();
    return r;
}

static std::optional<Jet> try_divide_var(const Jet& f, int j) {
    Jet free_part(f.nvars(), f.trunc()), quot(f.nvars(), f.trunc());
    split_by_var(f, j, free_part, quot);
    if (!free_part.is_zero()) return std::nullopt;
    return quot;
}

LogFormJet log_pullback(const FormalMap& phi, const LogFormJet& w) {
    if (phi.nvars() != w.nvars() || phi.trunc() != w.trunc())
        fail(ErrorCode::DimensionMismatch, "map and log form live in different jet spaces");
    int n = w.nvars(), N = w.trunc();
    // phi must send each coordinate hyperplane of the divisor onto one:
    // phi_i = x_{j(i)} * u_i with u_i a unit.
    std::map<int, std::pair<int, Jet>> factor; // i -> (j, u_i)
    std::vector<int> new_logs;
    for (int i : w.log_indices) {
        bool found = false;
        for (int j = 0; j < n && !found; ++j) {
            auto q = try_divide_var(phi.comp(i), j);
            if (q && !q->constant_term().is_zero()) {
                factor.emplace(i, std::make_pair(j, *q));
                new_logs.push_back(j);
                found = true;
            }
        }
        if (!found)
            fail(ErrorCode::DivisorNotPreserved, "map does not preserve the log divisor");
    }
    LogFormJet r(new_logs, n, N, w.degree());
    r.regular = pullback(phi, w.regular);
    for (const auto& [i, beta] : w.log_parts) {
        const auto& [j, u] = factor.at(i);
        FormJet pb = pullback(phi, beta);
        r.log_parts.at(j) = r.log_parts.at(j) + pb;
        Jet uinv = unit_function(u, UnitKind::Reciprocal);
        FormJet dlogu(n, N, 1);
        for (int l = 0; l < n; ++l) dlogu.add({l}, uinv * jet_partial(u, l));
        r.regular = r.regular + wedge(dlogu, pb);
    }
    r.canonicalize();
    return r;
}

LogFormJet log_transport(const FormalMap& phi, const LogFormJet& w) {
    return log_pullback(map_inverse(phi), w);
}

std::vector<std::vector<Jet>> log_gram(const LogFormJet& w) {
    if (w.degree() != 2) fail(ErrorCode::DimensionMismatch, "gram matrix needs a 2-form");
    int n = w.nvars(), N = w.trunc();
    std::vector<bool> is_log(static_cast<std::size_t>(n), false);
    for (int i : w.log_indices) is_log[static_cast<std::size_t>(i)] = true;
    auto scale = [&](int p) {
        return is_log[static_cast<std::size_t>(p)] ? Jet::variable(n, N, p) : Jet::one(n, N);
    };
    std::vector<std::vector<Jet>> B(static_cast<std::size_t>(n),
                                    std::vector<Jet>(static_cast<std::size_t>(n), Jet(n, N)));
    auto accum = [&](int p, int q, const Jet& c) {
        if (p == q) return;
        B[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] += c;
        B[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)] -= c;
    };
    for (const auto& [i, beta] : w.log_parts)
        for (const auto& [idx, c] : beta.comps()) accum(i, idx[0], c * scale(idx[0]));
    for (const auto& [idx, c] : w.regular.comps())
        accum(idx[0], idx[1], c * scale(idx[0]) * scale(idx[1]));
    return B;
}

static Jet pfaffian_rec(const std::vector<std::vector<Jet>>& B, std::vector<int> rows) {
    int n = B.empty() ? 0 : B.front().front().nvars();
    int N = B.empty() ? 0 : B.front().front().trunc();
    if (rows.empty()) return Jet::one(n, N);
    Jet r(n, N);
    int r0 = rows[0];
    for (std::size_t a = 1; a < rows.size(); ++a) {
        const Jet& entry = B[static_cast<std::size_t>(r0)][static_cast<std::size_t>(rows[a])];
        if (entry.is_zero()) continue;
        std::vector<int> rest;
        rest.reserve(rows.size() - 2);
        for (std::size_t b = 1; b < rows.size(); ++b)
            if (b != a) rest.push_back(rows[b]);
        Jet sub = entry * pfaffian_rec(B, std::move(rest));
        r = (a % 2 == 1) ? r + sub : r - sub;
    }
    return r;
}

Jet pfaffian(const std::vector<std::vector<Jet>>& B) {
    int n = static_cast<int>(B.size());
    if (n == 0) fail(ErrorCode::DimensionMismatch, "empty matrix");
    if (n % 2 == 1) return Jet(B.front().front().nvars(), B.front().front().trunc());
    std::vector<int> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
    return pfaffian_rec(B, std::move(rows));
}

} // namespace nfkit
