#pragma once

#include <map>

#include "nfkit/tensor.hpp"

namespace nfkit {

// Polynomial in a formal time variable t with jet coefficients.
class TJet {
public:
    TJet(int nvars, int trunc) : nvars_(nvars), trunc_(trunc) {}

    static TJet from_jet(const Jet& c) { return t_term(0, c); }
    static TJet t_term(int k, const Jet& c);

    int nvars() const { return nvars_; }
    int trunc() const { return trunc_; }
    const std::map<int, Jet>& coeffs() const { return coeffs_; }

    bool is_zero() const { return coeffs_.empty(); }
    int tdeg() const { return coeffs_.empty() ? -1 : coeffs_.rbegin()->first; }
    Jet coeff(int k) const;
    void add_coeff(int k, const Jet& c);
    // Minimum jet order over all t coefficients; trunc+1 when zero.
    int space_order() const;

    Jet at_one() const;
    Jet at(const Scalar& t) const;
    TJet integrate_t() const; // definite integral from 0 to t

    TJet operator-() const;
    friend TJet operator+(const TJet& a, const TJet& b);
    friend TJet operator-(const TJet& a, const TJet& b);
    friend TJet operator*(const TJet& a, const TJet& b);
    friend TJet operator*(const Scalar& c, const TJet& a);
    friend TJet operator*(const Jet& f, const TJet& a);
    TJet& operator+=(const TJet& o) { *this = *this + o; return *this; }
    TJet& operator-=(const TJet& o) { *this = *this - o; return *this; }
    friend bool operator==(const TJet& a, const TJet& b) {
        return a.nvars_ == b.nvars_ && a.trunc_ == b.trunc_ && a.coeffs_ == b.coeffs_;
    }
    friend bool operator!=(const TJet& a, const TJet& b) { return !(a == b); }

private:
    int nvars_;
    int trunc_;
    std::map<int, Jet> coeffs_;
};

TJet tjet_partial(const TJet& f, int i);
TJet tjet_integrate(const TJet& f, int i);
// Reciprocal; needs an invertible t^0 part and positive space order in the rest.
TJet tjet_reciprocal(const TJet& q);
// f(phi_1(t), ..., phi_n(t)); every t coefficient of each phi_j must have zero
// constant term.
TJet tjet_compose(const Jet& f, const std::vector<TJet>& comps);

// Time-dependent vector field, polynomial in t.
struct TFieldJet {
    int nvars;
    int trunc;
    std::vector<TJet> comps;

    TFieldJet(int n, int N) : nvars(n), trunc(N), comps(static_cast<std::size_t>(n), TJet(n, N)) {}
    explicit TFieldJet(const VectorFieldJet& X);

    const TJet& comp(int i) const { return comps[static_cast<std::size_t>(i)]; }
    TJet& comp(int i) { return comps[static_cast<std::size_t>(i)]; }
    int space_order() const;
};

// Time-1 map of the flow of X_t; X must have space order >= 2.
FormalMap time1_flow(const TFieldJet& X);
FormalMap time1_flow(const VectorFieldJet& X);

} // namespace nfkit
