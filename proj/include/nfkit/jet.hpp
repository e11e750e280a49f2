#pragma once

#include <map>
#include <vector>

#include "nfkit/scalar.hpp"

namespace nfkit {

struct Monomial {
    std::vector<unsigned> e;

    Monomial() = default;
    explicit Monomial(int nvars) : e(static_cast<std::size_t>(nvars), 0u) {}
    Monomial(std::initializer_list<unsigned> init) : e(init) {}

    int nvars() const { return static_cast<int>(e.size()); }
    int degree() const {
        int d = 0;
        for (unsigned k : e) d += static_cast<int>(k);
        return d;
    }
    bool divides(const Monomial& m) const {
        for (std::size_t j = 0; j < e.size(); ++j)
            if (e[j] > m.e[j]) return false;
        return true;
    }
    Monomial operator*(const Monomial& m) const {
        Monomial r = *this;
        for (std::size_t j = 0; j < e.size(); ++j) r.e[j] += m.e[j];
        return r;
    }
    Monomial operator/(const Monomial& m) const {
        Monomial r = *this;
        for (std::size_t j = 0; j < e.size(); ++j) r.e[j] -= m.e[j];
        return r;
    }
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }
    friend bool operator!=(const Monomial& a, const Monomial& b) { return a.e != b.e; }
};

// Graded lexicographic order: compare total degree first, then exponents
// lexicographically. Gives the canonical term order used everywhere.
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        int da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        return a.e < b.e;
    }
};

class Jet {
public:
    using TermMap = std::map<Monomial, Scalar, GrlexLess>;

    Jet(int nvars, int trunc);

    static Jet constant(int nvars, int trunc, const Scalar& c);
    static Jet one(int nvars, int trunc) { return constant(nvars, trunc, Scalar(1)); }
    static Jet variable(int nvars, int trunc, int i);
    static Jet term(int nvars, int trunc, const Monomial& m, const Scalar& c);

    int nvars() const { return nvars_; }
    int trunc() const { return trunc_; }
    const TermMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    Scalar coeff(const Monomial& m) const;
    Scalar constant_term() const { return coeff(Monomial(nvars_)); }
    // Lowest degree of a nonzero term; trunc()+1 for the zero jet.
    int order() const;
    // Drop terms of degree > d (keeps the nominal truncation degree).
    Jet truncated(int d) const;
    // Homogeneous part of degree d.
    Jet graded_part(int d) const;
    void set(const Monomial& m, const Scalar& c);
    void add_term(const Monomial& m, const Scalar& c);

    Jet operator-() const;
    friend Jet operator+(const Jet& a, const Jet& b);
    friend Jet operator-(const Jet& a, const Jet& b);
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator*(const Scalar& c, const Jet& a);
    Jet& operator+=(const Jet& o) { *this = *this + o; return *this; }
    Jet& operator-=(const Jet& o) { *this = *this - o; return *this; }
    Jet& operator*=(const Jet& o) { *this = *this * o; return *this; }

    friend bool operator==(const Jet& a, const Jet& b) {
        return a.nvars_ == b.nvars_ && a.trunc_ == b.trunc_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Jet& a, const Jet& b) { return !(a == b); }

    std::string str(const std::vector<std::string>& var_names = {}) const;

private:
    int nvars_;
    int trunc_;
    TermMap terms_;
};

void require_compatible(const Jet& a, const Jet& b);

class FormalMap {
public:
    FormalMap(int nvars, int trunc);
    explicit FormalMap(std::vector<Jet> comps);

    static FormalMap identity(int nvars, int trunc);
    // phi_i = sum_j A[i][j] x_j.
    static FormalMap linear(int trunc, const std::vector<std::vector<Scalar>>& A);

    int nvars() const { return nvars_; }
    int trunc() const { return trunc_; }
    const Jet& comp(int i) const { return comps_[static_cast<std::size_t>(i)]; }
    Jet& comp(int i) { return comps_[static_cast<std::size_t>(i)]; }
    const std::vector<Jet>& comps() const { return comps_; }

    std::vector<std::vector<Scalar>> linear_part() const;
    bool is_identity() const;

    friend bool operator==(const FormalMap& a, const FormalMap& b) {
        return a.nvars_ == b.nvars_ && a.trunc_ == b.trunc_ && a.comps_ == b.comps_;
    }
    friend bool operator!=(const FormalMap& a, const FormalMap& b) { return !(a == b); }

private:
    int nvars_;
    int trunc_;
    std::vector<Jet> comps_;
};

Jet jet_compose(const Jet& f, const std::vector<Jet>& comps);
Jet jet_compose(const Jet& f, const FormalMap& phi);
FormalMap map_compose(const FormalMap& phi, const FormalMap& psi); // phi after psi
FormalMap map_inverse(const FormalMap& phi);

Jet jet_partial(const Jet& f, int i);
Jet jet_integrate(const Jet& f, int i);
Jet divide_exact(const Jet& f, const Jet& g);

enum class UnitKind { Sqrt, Exp, Log, Reciprocal };
Jet unit_function(const Jet& u, UnitKind kind);

} // namespace nfkit
