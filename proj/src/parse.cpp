#include "nfkit/parse.hpp"

#include <cctype>
#include <sstream>

#include "nfkit/error.hpp"

namespace nfkit {

namespace {

struct Token {
    enum Kind { Num, Ident, Sym, End } kind = End;
    std::string text;
    int line = 1;
    int col = 1;
};

[[noreturn]] void parse_fail(const Token& t, const std::string& msg) {
    std::ostringstream os;
    os << "line " << t.line << " col " << t.col << ": " << msg;
    fail(ErrorCode::ParseError, os.str());
}

std::vector<Token> lex(const std::string& text, int line0) {
    std::vector<Token> out;
    int line = line0, col = 1;
    std::size_t p = 0;
    while (p < text.size()) {
        char c = text[p];
        if (c == '\n') {
            ++line;
            col = 1;
            ++p;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++col;
            ++p;
            continue;
        }
        if (c == '#') {
            while (p < text.size() && text[p] != '\n') ++p;
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            t.kind = Token::Num;
            while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p]))) {
                t.text += text[p++];
                ++col;
            }
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            t.kind = Token::Ident;
            while (p < text.size() && (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_')) {
                t.text += text[p++];
                ++col;
            }
        } else if (std::string("+-*/^(),=").find(c) != std::string::npos) {
            t.kind = Token::Sym;
            t.text = c;
            ++p;
            ++col;
        } else {
            parse_fail(t, std::string("unexpected character '") + c + "'");
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

struct Parser {
    std::vector<Token> toks;
    std::size_t pos = 0;
    const std::vector<std::string>& vars;
    int nv;
    int N;

    Parser(const std::string& text, int line0, const std::vector<std::string>& v, int degree)
        : toks(lex(text, line0)), vars(v), nv(static_cast<int>(v.size())), N(degree) {}

    const Token& peek() const { return toks[pos]; }
    Token next() { return toks[pos++]; }
    bool accept_sym(const char* s) {
        if (peek().kind == Token::Sym && peek().text == s) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect_sym(const char* s) {
        if (!accept_sym(s)) parse_fail(peek(), std::string("expected '") + s + "'");
    }

    int var_index(const std::string& name) const {
        for (int j = 0; j < nv; ++j)
            if (vars[static_cast<std::size_t>(j)] == name) return j;
        return -1;
    }

    ParsedObject negate(ParsedObject a) {
        return std::visit([](auto&& v) -> ParsedObject { return -v; }, std::move(a));
    }

    LogFormJet as_log(const ParsedObject& a) {
        if (const auto* w = std::get_if<LogFormJet>(&a)) return *w;
        const auto& f = std::get<FormJet>(a);
        LogFormJet r({}, nv, N, f.degree());
        r.regular = f;
        return r;
    }

    ParsedObject add(ParsedObject a, ParsedObject b, const Token& at) {
        if (std::holds_alternative<Jet>(a) && std::holds_alternative<Jet>(b))
            return std::get<Jet>(a) + std::get<Jet>(b);
        if (std::holds_alternative<MultiVectorJet>(a) && std::holds_alternative<MultiVectorJet>(b)) {
            const auto& x = std::get<MultiVectorJet>(a);
            const auto& y = std::get<MultiVectorJet>(b);
            if (x.degree() != y.degree()) parse_fail(at, "added multivectors have different degrees");
            return x + y;
        }
        bool loga = std::holds_alternative<LogFormJet>(a) || std::holds_alternative<FormJet>(a);
        bool logb = std::holds_alternative<LogFormJet>(b) || std::holds_alternative<FormJet>(b);
        if (loga && logb) {
            if (std::holds_alternative<FormJet>(a) && std::holds_alternative<FormJet>(b)) {
                const auto& x = std::get<FormJet>(a);
                const auto& y = std::get<FormJet>(b);
                if (x.degree() != y.degree()) parse_fail(at, "added forms have different degrees");
                return x + y;
            }
            LogFormJet x = as_log(a), y = as_log(b);
            if (x.degree() != y.degree()) parse_fail(at, "added forms have different degrees");
            return x + y;
        }
        parse_fail(at, "cannot add objects of different types");
    }

    ParsedObject mul(ParsedObject a, ParsedObject b, const Token& at) {
        if (std::holds_alternative<Jet>(a) && std::holds_alternative<Jet>(b))
            return std::get<Jet>(a) * std::get<Jet>(b);
        if (std::holds_alternative<Jet>(b) && !std::holds_alternative<Jet>(a)) return mul(std::move(b), std::move(a), at);
        if (std::holds_alternative<Jet>(a)) {
            const Jet& f = std::get<Jet>(a);
            if (const auto* w = std::get_if<FormJet>(&b)) return f * (*w);
            if (const auto* w = std::get_if<MultiVectorJet>(&b)) return f * (*w);
            const auto& w = std::get<LogFormJet>(b);
            LogFormJet r(w.log_indices, nv, N, w.degree());
            for (const auto& [i, beta] : w.log_parts) r.log_parts.at(i) = f * beta;
            r.regular = f * w.regular;
            return r;
        }
        if (std::holds_alternative<FormJet>(a) && std::holds_alternative<FormJet>(b))
            return wedge(std::get<FormJet>(a), std::get<FormJet>(b));
        if (std::holds_alternative<MultiVectorJet>(a) && std::holds_alternative<MultiVectorJet>(b))
            return wedge(std::get<MultiVectorJet>(a), std::get<MultiVectorJet>(b));
        if (std::holds_alternative<LogFormJet>(a) && std::holds_alternative<FormJet>(b)) {
            const auto& w = std::get<LogFormJet>(a);
            const auto& u = std::get<FormJet>(b);
            LogFormJet r(w.log_indices, nv, N, w.degree() + u.degree());
            for (const auto& [i, beta] : w.log_parts) r.log_parts.at(i) = wedge(beta, u);
            r.regular = wedge(w.regular, u);
            return r;
        }
        if (std::holds_alternative<FormJet>(a) && std::holds_alternative<LogFormJet>(b)) {
            const auto& u = std::get<FormJet>(a);
            const auto& w = std::get<LogFormJet>(b);
            LogFormJet r(w.log_indices, nv, N, w.degree() + u.degree());
            for (const auto& [i, beta] : w.log_parts) {
                FormJet part = wedge(u, beta);
                r.log_parts.at(i) = u.degree() % 2 == 0 ? part : -part;
            }
            r.regular = wedge(u, w.regular);
            return r;
        }
        parse_fail(at, "cannot multiply objects of these types");
    }

    ParsedObject primary() {
        Token t = next();
        if (t.kind == Token::Num) {
            return Jet::constant(nv, N, Scalar(mpq_class(t.text)));
        }
        if (t.kind == Token::Sym && t.text == "(") {
            ParsedObject v = sum();
            expect_sym(")");
            return v;
        }
        if (t.kind != Token::Ident) parse_fail(t, "expected a term");
        if (t.text == "i") return Jet::constant(nv, N, Scalar::i());
        if (t.text == "dlog") {
            expect_sym("(");
            Token v = next();
            int j = v.kind == Token::Ident ? var_index(v.text) : -1;
            if (j < 0) parse_fail(v, "dlog needs a declared variable");
            expect_sym(")");
            LogFormJet r({j}, nv, N, 1);
            FormJet one(nv, N, 0);
            one.add({}, Jet::one(nv, N));
            r.log_parts.at(j) = one;
            return r;
        }
        int j = var_index(t.text);
        if (j >= 0) return Jet::variable(nv, N, j);
        if (t.text.size() > 1) {
            int tail = var_index(t.text.substr(1));
            if (tail >= 0 && t.text[0] == 'D') return mv_basis(nv, N, tail);
            if (tail >= 0 && t.text[0] == 'd') return form_dx(nv, N, tail);
        }
        fail(ErrorCode::UnknownVariable, "line " + std::to_string(t.line) + " col " + std::to_string(t.col) +
                                             ": unknown name '" + t.text + "'");
    }

    ParsedObject unary() {
        if (peek().kind == Token::Sym && peek().text == "-") {
            Token t = next();
            (void)t;
            return negate(unary());
        }
        return primary();
    }

    ParsedObject product() {
        ParsedObject v = unary();
        while (peek().kind == Token::Sym &&
               (peek().text == "*" || peek().text == "^" || peek().text == "/")) {
            Token op = next();
            ParsedObject w = unary();
            if (op.text == "/") {
                const auto* num = std::get_if<Jet>(&v);
                const auto* den = std::get_if<Jet>(&w);
                if (!num || !den || den->is_zero() || *den != Jet::constant(nv, N, den->constant_term()))
                    parse_fail(op, "division is only defined by nonzero constants");
                v = Scalar(1) / den->constant_term() * (*num);
            } else {
                v = mul(std::move(v), std::move(w), op);
            }
        }
        return v;
    }

    ParsedObject sum() {
        ParsedObject v = product();
        while (peek().kind == Token::Sym && (peek().text == "+" || peek().text == "-")) {
            Token op = next();
            ParsedObject w = product();
            if (op.text == "-") w = negate(std::move(w));
            v = add(std::move(v), std::move(w), op);
        }
        return v;
    }

    ParsedObject parse_all() {
        ParsedObject v = sum();
        if (peek().kind != Token::End) parse_fail(peek(), "trailing input after expression");
        if (auto* w = std::get_if<MultiVectorJet>(&v); w && w->degree() == 1) return field_from_mv(*w);
        if (auto* w = std::get_if<LogFormJet>(&v)) w->canonicalize();
        return v;
    }
};

std::string rat_str(const mpq_class& q) { return q.get_str(); }

// Coefficient in grammar notation; complex values are parenthesized.
std::string coeff_str(const Scalar& c) {
    if (c.im == 0) return rat_str(c.re);
    std::string im = (abs(c.im) == 1 ? std::string("i") : rat_str(abs(c.im)) + "*i");
    if (c.re == 0) return (c.im < 0 ? "-" : "") + im;
    return "(" + rat_str(c.re) + (c.im < 0 ? "-" : "+") + im + ")";
}

std::string monomial_str(const Monomial& m, const std::vector<std::string>& vars) {
    std::string out;
    for (int j = 0; j < m.nvars(); ++j)
        for (unsigned k = 0; k < m.e[static_cast<std::size_t>(j)]; ++k) {
            if (!out.empty()) out += "*";
            out += vars[static_cast<std::size_t>(j)];
        }
    return out;
}

std::string jet_str(const Jet& f, const std::vector<std::string>& vars) {
    if (f.is_zero()) return "0";
    std::string out;
    for (const auto& [m, c] : f.terms()) {
        if (!out.empty()) out += " + ";
        std::string mono = monomial_str(m, vars);
        if (mono.empty())
            out += coeff_str(c);
        else if (c == Scalar(1))
            out += mono;
        else
            out += coeff_str(c) + "*" + mono;
    }
    return out;
}

std::string tuple_str(const IndexTuple& idx, const std::vector<std::string>& vars, char basis) {
    std::string out;
    for (int j : idx) {
        if (!out.empty()) out += "^";
        out += basis;
        out += vars[static_cast<std::size_t>(j)];
    }
    return out;
}

template <Variance V>
std::string tensor_str(const AltTensor<V>& w, const std::vector<std::string>& vars) {
    if (w.all_zero()) return "0";
    char basis = V == Variance::Covariant ? 'd' : 'D';
    std::string out;
    for (const auto& [idx, c] : w.comps()) {
        if (c.is_zero()) continue;
        if (!out.empty()) out += " + ";
        if (idx.empty()) {
            out += "(" + jet_str(c, vars) + ")";
        } else if (c == Jet::one(c.nvars(), c.trunc())) {
            out += tuple_str(idx, vars, basis);
        } else {
            out += "(" + jet_str(c, vars) + ")*" + tuple_str(idx, vars, basis);
        }
    }
    return out.empty() ? "0" : out;
}

} // namespace

const ParsedObject* ProblemFile::find(const std::string& name) const {
    for (const auto& [k, v] : objects)
        if (k == name) return &v;
    return nullptr;
}

ParsedObject parse_expression(const std::string& text, const std::vector<std::string>& vars, int degree) {
    Parser p(text, 1, vars, degree);
    return p.parse_all();
}

ProblemFile parse_problem(const std::string& text) {
    ProblemFile pf;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto bad = [&](int col, const std::string& msg) {
        Token t;
        t.line = lineno;
        t.col = col;
        parse_fail(t, msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = line.substr(0, line.find('#'));
        if (body.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::size_t colon = body.find(':');
        std::size_t eq = body.find('=');
        if (colon != std::string::npos && (eq == std::string::npos || colon < eq)) {
            std::istringstream key_in(body.substr(0, colon));
            std::string key;
            key_in >> key;
            std::string value = body.substr(colon + 1);
            std::size_t a = value.find_first_not_of(" \t\r");
            std::size_t b = value.find_last_not_of(" \t\r");
            value = a == std::string::npos ? "" : value.substr(a, b - a + 1);
            if (key == "vars") {
                std::istringstream vs(value);
                std::string v;
                while (vs >> v) pf.vars.push_back(v);
                if (pf.vars.empty()) bad(1, "empty variable declaration");
            } else if (key == "degree") {
                try {
                    pf.degree = std::stoi(value);
                } catch (const std::exception&) {
                    bad(static_cast<int>(colon) + 2, "degree must be an integer");
                }
                if (pf.degree < 1) bad(static_cast<int>(colon) + 2, "degree must be positive");
            } else if (key == "task") {
                pf.task = value;
            } else {
                pf.options[key] = value;
            }
            continue;
        }
        if (eq != std::string::npos) {
            std::istringstream name_in(body.substr(0, eq));
            std::string name;
            name_in >> name;
            std::string tail;
            if (name.empty() || (name_in >> tail)) bad(1, "expected 'name = expression'");
            if (pf.vars.empty() || pf.degree == 0) bad(1, "vars and degree must precede assignments");
            Parser p(body.substr(eq + 1), lineno, pf.vars, pf.degree);
            pf.objects.emplace_back(name, p.parse_all());
            continue;
        }
        bad(1, "expected a directive or an assignment");
    }
    return pf;
}

std::string print_object(const ParsedObject& obj, const std::vector<std::string>& vars) {
    if (const auto* f = std::get_if<Jet>(&obj)) return jet_str(*f, vars);
    if (const auto* w = std::get_if<FormJet>(&obj)) return tensor_str(*w, vars);
    if (const auto* w = std::get_if<MultiVectorJet>(&obj)) return tensor_str(*w, vars);
    if (const auto* X = std::get_if<VectorFieldJet>(&obj)) {
        std::string out;
        for (int i = 0; i < X->nvars; ++i) {
            if (X->comp(i).is_zero()) continue;
            if (!out.empty()) out += " + ";
            out += "(" + jet_str(X->comp(i), vars) + ")*D" + vars[static_cast<std::size_t>(i)];
        }
        return out.empty() ? "0*D" + vars[0] : out;
    }
    const auto& w = std::get<LogFormJet>(obj);
    std::string out;
    for (const auto& [i, beta] : w.log_parts) {
        if (beta.all_zero()) continue;
        if (!out.empty()) out += " + ";
        out += "dlog(" + vars[static_cast<std::size_t>(i)] + ")^(" + tensor_str(beta, vars) + ")";
    }
    if (!w.regular.all_zero()) {
        if (!out.empty()) out += " + ";
        out += tensor_str(w.regular, vars);
    }
    return out.empty() ? "0" : out;
}

} // namespace nfkit
