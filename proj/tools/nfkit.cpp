#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nfkit/certificate.hpp"
#include "nfkit/geonormal.hpp"

using namespace nfkit;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::ParseError, "cannot open '" + path + "' for writing");
    out << text;
}

int max_degree_guard() {
    const char* env = std::getenv("NFKIT_MAX_DEGREE");
    return env ? std::atoi(env) : 12;
}

ProblemFile load_problem(const std::string& path) {
    ProblemFile pf = parse_problem(read_file(path));
    if (pf.degree > max_degree_guard())
        fail(ErrorCode::DimensionMismatch, "degree exceeds the NFKIT_MAX_DEGREE guard");
    return pf;
}

std::string option_of(const ProblemFile& pf, const std::string& key, const std::string& fallback) {
    auto it = pf.options.find(key);
    return it != pf.options.end() ? it->second : fallback;
}

const VectorFieldJet& field_of(const ProblemFile& pf) {
    for (const auto& [name, obj] : pf.objects)
        if (const auto* X = std::get_if<VectorFieldJet>(&obj)) return *X;
    fail(ErrorCode::ParseError, "problem declares no vector field");
}

template <typename T>
const T& structure_of(const ProblemFile& pf) {
    for (const auto& [name, obj] : pf.objects) {
        if (std::holds_alternative<VectorFieldJet>(obj)) continue;
        if (const auto* S = std::get_if<T>(&obj)) return *S;
    }
    fail(ErrorCode::ParseError, "problem declares no structure of the requested type");
}

std::vector<Scalar> diagonal_of(const VectorFieldJet& X) {
    Mat L = X.linear_part();
    std::vector<Scalar> gamma;
    for (int i = 0; i < X.nvars; ++i) {
        for (int j = 0; j < X.nvars; ++j)
            if (i != j && !L[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_zero())
                fail(ErrorCode::NotInNormalForm, "field does not have a diagonal linear part");
        gamma.push_back(L[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
    }
    return gamma;
}

ContactKind contact_kind_of(const std::string& name) {
    if (name == "transversal") return ContactKind::Transversal;
    if (name == "tangential") return ContactKind::Tangential;
    if (name == "nonvanishing") return ContactKind::NonVanishing;
    fail(ErrorCode::ParseError, "unknown contact kind '" + name + "'");
}

int run_normalize(const std::string& input, const std::string& output, const std::string& structure) {
    ProblemFile pf = load_problem(input);
    std::string kind = structure.empty() ? option_of(pf, "structure", "") : structure;
    if (kind.empty()) fail(ErrorCode::ParseError, "no structure kind given (--structure or structure:)");
    const VectorFieldJet& X = field_of(pf);
    int N = pf.degree;
    NormalizationCertificate cert = [&] {
        if (kind == "folded-volume")
            return simul_normalize_folded_volume(X, structure_of<FormJet>(pf), N);
        if (kind == "log-nambu") return simul_normalize_log_nambu(X, structure_of<MultiVectorJet>(pf), N);
        if (kind == "multifolded") return simul_normalize_multifolded(X, structure_of<FormJet>(pf), N);
        if (kind == "log-symplectic")
            return simul_normalize_log_symplectic(X, structure_of<LogFormJet>(pf), N);
        if (kind == "contact-transversal" || kind == "contact-tangential") {
            const FormJet& alpha = structure_of<FormJet>(pf);
            int n = (alpha.nvars() - 1) / 2;
            if (kind == "contact-transversal") {
                SingularContactJet a{n, ContactKind::Transversal, 0, alpha};
                return simul_normalize_transversal_contact(X, a, N);
            }
            int m = std::stoi(option_of(pf, "m", "3"));
            SingularContactJet a{n, ContactKind::Tangential, m, alpha};
            return simul_normalize_tangential_contact(X, a, N);
        }
        fail(ErrorCode::ParseError, "unknown structure kind '" + kind + "'");
    }();
    write_output(output, render_certificate(to_json(cert)));
    return cert.valid() ? 0 : 1;
}

int run_canon(const std::string& input, const std::string& output, const std::string& structure) {
    ProblemFile pf = load_problem(input);
    std::string kind = structure.empty() ? option_of(pf, "structure", "") : structure;
    int N = pf.degree;
    FormalMap phi = [&] {
        if (kind == "folded-volume") return canon_folded_volume(structure_of<FormJet>(pf), N);
        if (kind == "log-nambu") return canon_log_nambu(structure_of<MultiVectorJet>(pf), N);
        if (kind == "log-symplectic")
            return canon_log_symplectic(structure_of<LogFormJet>(pf), std::nullopt, N);
        fail(ErrorCode::ParseError, "canon supports folded-volume, log-nambu, log-symplectic");
    }();
    write_output(output, render_certificate(nlohmann::json{{"phi", to_json(phi)}}));
    return 0;
}

int run_conservation(const std::string& input, const std::string& output) {
    ProblemFile pf = load_problem(input);
    const VectorFieldJet& X = field_of(pf);
    TensorValue numerator = [&]() -> TensorValue {
        for (const auto& [name, obj] : pf.objects) {
            if (const auto* w = std::get_if<FormJet>(&obj)) return *w;
            if (const auto* w = std::get_if<MultiVectorJet>(&obj)) return *w;
        }
        fail(ErrorCode::ParseError, "problem declares no tensor numerator");
    }();
    Jet den = Jet::one(X.nvars, X.trunc);
    if (const ParsedObject* f = pf.find("f")) den = std::get<Jet>(*f);
    RationalTensorJet Lambda = make_rational(numerator, den);
    ConservationMode mode = option_of(pf, "mode", "invariant") == "semi-invariant"
                                ? ConservationMode::SemiInvariant
                                : ConservationMode::Invariant;
    ToricAction torus = toric_generators(diagonal_of(X));
    ConservationReport rep = verify_conservation(X, Lambda, torus, mode);
    write_output(output, render_certificate(to_json(rep)));
    return rep.conserved ? 0 : 1;
}

int run_resonances(const std::string& eigenvalues, int degree, const std::string& output) {
    std::vector<Scalar> gamma;
    std::istringstream in(eigenvalues);
    std::string item;
    while (std::getline(in, item, ',')) gamma.push_back(scalar_from_string(item));
    if (gamma.empty()) fail(ErrorCode::ParseError, "no eigenvalues given");
    if (degree > max_degree_guard())
        fail(ErrorCode::DimensionMismatch, "degree exceeds the NFKIT_MAX_DEGREE guard");
    ToricAction act = toric_generators(gamma);
    ResonanceLattice lat = resonance_lattice(gamma, degree);
    nlohmann::json vf = nlohmann::json::array();
    for (const auto& [m, i] : lat.vf_resonances) vf.push_back(nlohmann::json{{"e", m.e}, {"i", i}});
    nlohmann::json kern = nlohmann::json::array();
    for (const Monomial& m : lat.kernel_monomials) kern.push_back(m.e);
    // The structural relations of the volume normal-form theorems.
    Scalar folded = gamma[0];
    for (const Scalar& g : gamma) folded += g;
    Scalar nambu(0);
    for (std::size_t j = 1; j < gamma.size(); ++j) nambu += gamma[j];
    nlohmann::json doc{{"torus", to_json(act)},
                       {"vf_resonances", vf},
                       {"kernel_monomials", kern},
                       {"folded_volume_relation",
                        nlohmann::json{{"value", to_json(folded)}, {"satisfied", folded.is_zero()}}},
                       {"log_nambu_relation",
                        nlohmann::json{{"value", to_json(nambu)}, {"satisfied", nambu.is_zero()}}}};
    write_output(output, render_certificate(doc));
    return 0;
}

int run_contact_check(const std::string& input, const std::string& output) {
    ProblemFile pf = load_problem(input);
    const FormJet& alpha = structure_of<FormJet>(pf);
    int n = (alpha.nvars() - 1) / 2;
    ContactKind kind = contact_kind_of(option_of(pf, "kind", "transversal"));
    int m = kind == ContactKind::Tangential ? std::stoi(option_of(pf, "m", "3")) : 0;
    SingularContactJet a{n, kind, m, alpha};
    const VectorFieldJet& X = field_of(pf);
    ContactPreservationReport rep = verify_contact_preservation(X, a);
    nlohmann::json doc{{"preservation", to_json(rep)}};
    if (rep.preserved && kind != ContactKind::Tangential) {
        HamiltonianReport hr = extract_hamiltonian(X, a);
        doc["hamiltonian"] = nlohmann::json{{"H", to_json(hr.H)},
                                            {"independent_x1", hr.independent_x1},
                                            {"degree_relation", hr.degree_relation}};
    }
    write_output(output, render_certificate(doc));
    return rep.preserved ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact normal-form engine for jets of vector fields and singular structures"};
    app.require_subcommand(1);
    std::string input, output, structure, eigenvalues;
    int degree = 6;
    long seed = 0;
    app.add_option("--seed", seed, "seed for randomized property fixtures");

    CLI::App* normalize = app.add_subcommand("normalize", "simultaneous normalization certificate");
    normalize->add_option("-i,--input", input)->required();
    normalize->add_option("-o,--output", output);
    normalize->add_option("--structure", structure);

    CLI::App* canon = app.add_subcommand("canon", "canonical chart for a structure alone");
    canon->add_option("-i,--input", input)->required();
    canon->add_option("-o,--output", output);
    canon->add_option("--structure", structure);

    CLI::App* conserve = app.add_subcommand("verify-conservation", "toric conservation law check");
    conserve->add_option("-i,--input", input)->required();
    conserve->add_option("-o,--output", output);

    CLI::App* reson = app.add_subcommand("resonances", "resonance lattice and torus of eigenvalues");
    reson->add_option("--eigenvalues", eigenvalues)->required();
    reson->add_option("--degree", degree);
    reson->add_option("-o,--output", output);

    CLI::App* contact = app.add_subcommand("contact-check", "contact preservation and Hamiltonian report");
    contact->add_option("-i,--input", input)->required();
    contact->add_option("-o,--output", output);

    CLI11_PARSE(app, argc, argv);
    try {
        if (normalize->parsed()) return run_normalize(input, output, structure);
        if (canon->parsed()) return run_canon(input, output, structure);
        if (conserve->parsed()) return run_conservation(input, output);
        if (reson->parsed()) return run_resonances(eigenvalues, degree, output);
        if (contact->parsed()) return run_contact_check(input, output);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == ErrorCode::Internal ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 1;
}
