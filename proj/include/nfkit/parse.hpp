#pragma once

#include <map>
#include <string>
#include <variant>

#include "nfkit/tensor.hpp"

namespace nfkit {

using ParsedObject = std::variant<Jet, VectorFieldJet, FormJet, MultiVectorJet, LogFormJet>;

// A .nf problem: variable declarations, truncation degree, named objects given
// as expression text, a task directive, and free-form key/value options.
struct ProblemFile {
    std::vector<std::string> vars;
    int degree = 0;
    std::string task;
    std::vector<std::pair<std::string, ParsedObject>> objects;
    std::map<std::string, std::string> options;

    const ParsedObject* find(const std::string& name) const;
};

// Grammar: sums of products over '*', '/' (constant divisors) and '^' (wedge);
// atoms are integers, `i`, declared variables, `dv` / `Dv` for dv and d/dv of a
// declared variable v, and `dlog(v)`.
ParsedObject parse_expression(const std::string& text, const std::vector<std::string>& vars, int degree);

ProblemFile parse_problem(const std::string& text);

// Canonical rendering in the expression grammar; reparses to an equal object.
std::string print_object(const ParsedObject& obj, const std::vector<std::string>& vars);

} // namespace nfkit
