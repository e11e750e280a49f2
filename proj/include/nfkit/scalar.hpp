#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

#include "nfkit/error.hpp"

namespace nfkit {

// Element of Q(i): re + im*i with exact rational parts kept in lowest terms
// (mpq_class canonicalizes on construction and arithmetic).
struct Scalar {
    mpq_class re;
    mpq_class im;

    Scalar() : re(0), im(0) {}
    Scalar(long r) : re(r), im(0) {}
    Scalar(long num, long den) : re(mpq_class(num, den)), im(0) { re.canonicalize(); }
    Scalar(const mpq_class& r) : re(r), im(0) {}
    Scalar(const mpq_class& r, const mpq_class& i) : re(r), im(i) {}

    static Scalar i() { return Scalar(mpq_class(0), mpq_class(1)); }
    static Scalar of(long r, long i_part) { return Scalar(mpq_class(r), mpq_class(i_part)); }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    Scalar operator-() const { return Scalar(-re, -im); }
    Scalar conj() const { return Scalar(re, -im); }

    // |z|^2, a non-negative rational.
    mpq_class norm() const { return re * re + im * im; }

    friend Scalar operator+(const Scalar& a, const Scalar& b) { return Scalar(a.re + b.re, a.im + b.im); }
    friend Scalar operator-(const Scalar& a, const Scalar& b) { return Scalar(a.re - b.re, a.im - b.im); }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        return Scalar(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) {
        if (b.is_zero()) fail(ErrorCode::NotAUnit, "division by zero scalar");
        mpq_class n = b.norm();
        return Scalar((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
    }
    Scalar& operator+=(const Scalar& o) { re += o.re; im += o.im; return *this; }
    Scalar& operator-=(const Scalar& o) { re -= o.re; im -= o.im; return *this; }
    Scalar& operator*=(const Scalar& o) { *this = *this * o; return *this; }
    Scalar& operator/=(const Scalar& o) { *this = *this / o; return *this; }

    friend bool operator==(const Scalar& a, const Scalar& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }
    // Total order (lexicographic on re, im) for deterministic containers; not an
    // order compatible with the field structure.
    friend bool operator<(const Scalar& a, const Scalar& b) {
        int c = cmp(a.re, b.re);
        if (c != 0) return c < 0;
        return cmp(a.im, b.im) < 0;
    }

    std::string str() const;
};

// Exact square root of a non-negative rational, if it is a perfect square.
std::optional<mpq_class> rational_sqrt(const mpq_class& q);

// Exact square root in Q(i), if one exists. The root with re > 0, or re = 0 and
// im >= 0, is returned (deterministic branch).
std::optional<Scalar> scalar_sqrt(const Scalar& z);

// Parse "p/q", "-3", "2+3i", "i", "-i/2" style literals (used by tests/CLI).
Scalar scalar_from_string(const std::string& text);

} // namespace nfkit
