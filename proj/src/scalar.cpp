#include "nfkit/scalar.hpp"

#include <cstddef>

namespace nfkit {

std::string Scalar::str() const {
    auto rat = [](const mpq_class& q) { return q.get_str(); };
    if (im == 0) return rat(re);
    std::string imag = (abs(im) == 1) ? "i" : rat(abs(im)) + "i";
    if (re == 0) return (im < 0 ? "-" : "") + imag;
    return rat(re) + (im < 0 ? "-" : "+") + imag;
}

std::optional<mpq_class> rational_sqrt(const mpq_class& q) {
    if (q < 0) return std::nullopt;
    mpz_class num = q.get_num(), den = q.get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return std::nullopt;
    if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    return mpq_class(rn, rd);
}

std::optional<Scalar> scalar_sqrt(const Scalar& z) {
    if (z.im == 0) {
        if (z.re >= 0) {
            auto r = rational_sqrt(z.re);
            if (!r) return std::nullopt;
            return Scalar(*r);
        }
        auto r = rational_sqrt(mpq_class(-z.re));
        if (!r) return std::nullopt;
        return Scalar(mpq_class(0), *r);
    }
    auto r = rational_sqrt(z.norm());
    if (!r) return std::nullopt;
    auto x2 = mpq_class((z.re + *r) / 2);
    auto x = rational_sqrt(x2);
    if (!x || *x == 0) return std::nullopt;
    mpq_class y = z.im / (2 * *x);
    Scalar root(*x, y);
    if (root * root != z) return std::nullopt;
    if (root.re < 0 || (root.re == 0 && root.im < 0)) root = -root;
    return root;
}

Scalar scalar_from_string(const std::string& text) {
    // Grammar: term (('+'|'-') term)? where term is [p[/q]]['i'] with optional
    // leading sign on the first term.
    std::size_t pos = 0;
    auto parse_term = [&](bool allow_sign) -> Scalar {
        mpq_class sign = 1;
        if (allow_sign && pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            if (text[pos] == '-') sign = -1;
            ++pos;
        }
        std::string digits;
        while (pos < text.size() && (isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/'))
            digits += text[pos++];
        bool imag = pos < text.size() && text[pos] == 'i';
        if (imag) {
            ++pos;
            // allow "i/2"
            if (pos < text.size() && text[pos] == '/') {
                while (pos < text.size() && (isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/'))
                    digits += text[pos++];
            }
        }
        if (digits.empty()) {
            if (!imag) fail(ErrorCode::ParseError, "bad scalar literal '" + text + "'");
            digits = "1";
        } else if (digits.front() == '/') {
            digits = "1" + digits;
        }
        mpq_class mag;
        if (mag.set_str(digits, 10) != 0) fail(ErrorCode::ParseError, "bad rational '" + digits + "'");
        mag.canonicalize();
        if (mag.get_den() == 0) fail(ErrorCode::ParseError, "zero denominator in '" + text + "'");
        mag *= sign;
        return imag ? Scalar(mpq_class(0), mag) : Scalar(mag);
    };
    Scalar value = parse_term(true);
    while (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) value += parse_term(true);
    if (pos != text.size()) fail(ErrorCode::ParseError, "trailing characters in scalar '" + text + "'");
    return value;
}

} // namespace nfkit
