#pragma once

#include <map>

#include "nfkit/jet.hpp"
#include "nfkit/linalg.hpp"

namespace nfkit {

struct VectorFieldJet {
    int nvars;
    int trunc;
    std::vector<Jet> comps;

    VectorFieldJet(int n, int N) : nvars(n), trunc(N), comps(static_cast<std::size_t>(n), Jet(n, N)) {}
    explicit VectorFieldJet(std::vector<Jet> c);

    const Jet& comp(int i) const { return comps[static_cast<std::size_t>(i)]; }
    Jet& comp(int i) { return comps[static_cast<std::size_t>(i)]; }

    bool is_zero() const;
    bool vanishes_at_origin() const;
    int order() const; // min over components
    Mat linear_part() const;
    VectorFieldJet graded_part(int d) const;
    VectorFieldJet truncated(int d) const;

    // Derivation: X(f) = sum X_i df/dx_i.
    Jet apply(const Jet& f) const;

    VectorFieldJet operator-() const;
    friend VectorFieldJet operator+(const VectorFieldJet& a, const VectorFieldJet& b);
    friend VectorFieldJet operator-(const VectorFieldJet& a, const VectorFieldJet& b);
    friend VectorFieldJet operator*(const Scalar& c, const VectorFieldJet& a);
    friend VectorFieldJet operator*(const Jet& f, const VectorFieldJet& a);
    friend bool operator==(const VectorFieldJet& a, const VectorFieldJet& b) {
        return a.nvars == b.nvars && a.trunc == b.trunc && a.comps == b.comps;
    }
    friend bool operator!=(const VectorFieldJet& a, const VectorFieldJet& b) { return !(a == b); }

    static VectorFieldJet linear(int trunc, const Mat& A);
    static VectorFieldJet diagonal(int trunc, const std::vector<Scalar>& gamma);
    std::string str() const;
};

using IndexTuple = std::vector<int>; // strictly increasing coordinate indices

// Sorts idx in place; returns +1/-1 permutation sign, 0 on repeated index.
int sort_index_tuple(IndexTuple& idx);

enum class Variance { Covariant, Contravariant };

// Antisymmetric k-tensor with jet coefficients over increasing index tuples.
template <Variance V>
class AltTensor {
public:
    AltTensor(int nvars, int trunc, int degree) : nvars_(nvars), trunc_(trunc), degree_(degree) {}

    int nvars() const { return nvars_; }
    int trunc() const { return trunc_; }
    int degree() const { return degree_; }
    const std::map<IndexTuple, Jet>& comps() const { return comps_; }

    bool is_zero() const { return all_zero(); }
    Jet comp(IndexTuple idx) const; // any order, sign applied
    void add(IndexTuple idx, const Jet& c);
    void set_sorted(const IndexTuple& idx, const Jet& c);
    void prune();
    int coeff_order() const; // min order over components; trunc+1 if zero
    AltTensor truncated(int d) const;
    AltTensor graded_part(int d) const; // by coefficient degree

    AltTensor operator-() const;
    friend AltTensor operator+(const AltTensor& a, const AltTensor& b) {
        a.require_like(b);
        AltTensor r = a;
        for (const auto& [idx, c] : b.comps_) r.add(idx, c);
        r.prune();
        return r;
    }
    friend AltTensor operator-(const AltTensor& a, const AltTensor& b) {
        a.require_like(b);
        AltTensor r = a;
        for (const auto& [idx, c] : b.comps_) r.add(idx, -c);
        r.prune();
        return r;
    }
    friend AltTensor operator*(const Scalar& s, const AltTensor& a) {
        AltTensor r(a.nvars_, a.trunc_, a.degree_);
        for (const auto& [idx, c] : a.comps_) r.add(idx, s * c);
        r.prune();
        return r;
    }
    friend AltTensor operator*(const Jet& f, const AltTensor& a) {
        AltTensor r(a.nvars_, a.trunc_, a.degree_);
        for (const auto& [idx, c] : a.comps_) r.add(idx, f * c);
        r.prune();
        return r;
    }
    friend bool operator==(const AltTensor& a, const AltTensor& b) {
        if (a.nvars_ != b.nvars_ || a.trunc_ != b.trunc_ || a.degree_ != b.degree_) return false;
        return (a - b).all_zero();
    }
    friend bool operator!=(const AltTensor& a, const AltTensor& b) { return !(a == b); }

    void require_like(const AltTensor& o) const;
    bool all_zero() const {
        for (const auto& [idx, c] : comps_)
            if (!c.is_zero()) return false;
        return true;
    }
    std::string str() const;

private:
    int nvars_;
    int trunc_;
    int degree_;
    std::map<IndexTuple, Jet> comps_;
};

using FormJet = AltTensor<Variance::Covariant>;
using MultiVectorJet = AltTensor<Variance::Contravariant>;

extern template class AltTensor<Variance::Covariant>;
extern template class AltTensor<Variance::Contravariant>;

FormJet form_zero(int nvars, int trunc, int degree);
// dx_i as a 1-form / d/dx_i as a 1-vector.
FormJet form_dx(int nvars, int trunc, int i);
MultiVectorJet mv_basis(int nvars, int trunc, int i);
MultiVectorJet mv_from_field(const VectorFieldJet& X);
VectorFieldJet field_from_mv(const MultiVectorJet& W);

template <Variance V>
AltTensor<V> wedge(const AltTensor<V>& a, const AltTensor<V>& b);

FormJet exterior_d(const FormJet& w);
FormJet exterior_d(const Jet& f); // df
FormJet interior_product(const VectorFieldJet& X, const FormJet& w);

VectorFieldJet lie_bracket(const VectorFieldJet& X, const VectorFieldJet& Y);
FormJet lie_derivative(const VectorFieldJet& X, const FormJet& w);
MultiVectorJet lie_derivative(const VectorFieldJet& X, const MultiVectorJet& w);

// Jacobian matrix of jets, J[i][j] = d phi_i / d x_j.
std::vector<std::vector<Jet>> jacobian(const FormalMap& phi);

FormJet pullback(const FormalMap& phi, const FormJet& w);
VectorFieldJet pushforward(const FormalMap& phi, const VectorFieldJet& X);
MultiVectorJet pushforward(const FormalMap& phi, const MultiVectorJet& W);
// Transport of a form into the chart y = phi(x): pullback along phi^{-1}.
FormJet transport(const FormalMap& phi, const FormJet& w);

// Radial (Euler) homotopy primitive: eta with d(eta) = w to degree N-1.
FormJet poincare_primitive(const FormJet& w);

// ---- Log forms: sum over log indices of dx_i/x_i ^ beta_i, plus a regular part.

struct LogFormJet {
    std::vector<int> log_indices;      // sorted, distinct
    std::map<int, FormJet> log_parts;  // beta_i, degree k-1
    FormJet regular;                   // degree k

    LogFormJet(std::vector<int> logs, int nvars, int trunc, int degree);
    int nvars() const { return regular.nvars(); }
    int trunc() const { return regular.trunc(); }
    int degree() const { return regular.degree(); }

    // Move dx_i-collinear and x_i-divisible pieces of beta_i into the regular
    // part; makes the representation unique.
    void canonicalize();
    bool all_zero() const;

    LogFormJet operator-() const;
    friend LogFormJet operator+(const LogFormJet& a, const LogFormJet& b);
    friend LogFormJet operator-(const LogFormJet& a, const LogFormJet& b);
    friend bool operator==(const LogFormJet& a, const LogFormJet& b);
    friend bool operator!=(const LogFormJet& a, const LogFormJet& b) { return !(a == b); }
};

LogFormJet log_exterior_d(const LogFormJet& w);
LogFormJet log_interior_product(const VectorFieldJet& X, const LogFormJet& w);
LogFormJet log_lie_derivative(const VectorFieldJet& X, const LogFormJet& w);
LogFormJet log_pullback(const FormalMap& phi, const LogFormJet& w);
LogFormJet log_transport(const FormalMap& phi, const LogFormJet& w);
bool log_tangent(const VectorFieldJet& X, const std::vector<int>& log_indices);

// Gram matrix of a log 2-form in the basis e_i = dx_i/x_i (log) / dx_j, and the
// Pfaffian used for the h omega^n nondegeneracy check.
std::vector<std::vector<Jet>> log_gram(const LogFormJet& w);
Jet pfaffian(const std::vector<std::vector<Jet>>& B);

} // namespace nfkit
