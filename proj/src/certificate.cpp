#include "nfkit/certificate.hpp"

namespace nfkit {

using nlohmann::json;

nlohmann::json to_json(const Scalar& c) { return c.str(); }

nlohmann::json to_json(const Jet& f) {
    json terms = json::array();
    for (const auto& [m, c] : f.terms()) terms.push_back(json{{"e", m.e}, {"c", to_json(c)}});
    return json{{"nvars", f.nvars()}, {"trunc", f.trunc()}, {"terms", terms}};
}

nlohmann::json to_json(const FormalMap& phi) {
    json comps = json::array();
    for (const Jet& c : phi.comps()) comps.push_back(to_json(c));
    return json{{"comps", comps}};
}

nlohmann::json to_json(const VectorFieldJet& X) {
    json comps = json::array();
    for (const Jet& c : X.comps) comps.push_back(to_json(c));
    return json{{"comps", comps}};
}

namespace {

template <Variance V>
json tensor_json(const AltTensor<V>& w, const char* variance) {
    json comps = json::array();
    for (const auto& [idx, c] : w.comps()) {
        if (c.is_zero()) continue;
        comps.push_back(json{{"idx", idx}, {"coeff", to_json(c)}});
    }
    return json{{"variance", variance},
                {"degree", w.degree()},
                {"nvars", w.nvars()},
                {"trunc", w.trunc()},
                {"comps", comps}};
}

} // namespace

nlohmann::json to_json(const FormJet& w) { return tensor_json(w, "form"); }
nlohmann::json to_json(const MultiVectorJet& w) { return tensor_json(w, "multivector"); }

nlohmann::json to_json(const LogFormJet& w) {
    json logs = json::object();
    for (const auto& [i, beta] : w.log_parts) logs[std::to_string(i)] = to_json(beta);
    return json{{"variance", "logform"},
                {"log_indices", w.log_indices},
                {"log_parts", logs},
                {"regular", to_json(w.regular)}};
}

nlohmann::json to_json(const StructureValue& S) {
    return std::visit([](const auto& s) { return to_json(s); }, S);
}

nlohmann::json to_json(const ToricAction& act) {
    json rho = json::array();
    for (const Scalar& r : act.rho) rho.push_back(to_json(r));
    return json{{"tau", act.tau}, {"rho", rho}, {"Z", act.Z}};
}

nlohmann::json to_json(const NormalizationCertificate& cert) {
    json gamma = json::array();
    for (const Scalar& g : cert.gamma) gamma.push_back(to_json(g));
    json values = json::array();
    for (const Scalar& v : cert.resonance.values) values.push_back(to_json(v));
    return json{{"phi", to_json(cert.Phi)},
                {"x_nf", to_json(cert.X_nf)},
                {"structure_nf", to_json(cert.structure_nf)},
                {"structure_residual", to_json(cert.structure_residual)},
                {"dynamics_residual", to_json(cert.dynamics_residual)},
                {"gamma", gamma},
                {"torus", to_json(cert.torus)},
                {"resonance", json{{"values", values}, {"ok", cert.resonance.ok}}},
                {"valid", cert.valid()}};
}

nlohmann::json to_json(const PDResult& pd) {
    json gamma = json::array();
    for (const Scalar& g : pd.gamma) gamma.push_back(to_json(g));
    json support = json::array();
    for (const auto& [m, i] : pd.resonant_support) support.push_back(json{{"e", m.e}, {"i", i}});
    json lin = json::array();
    for (const auto& row : pd.linear_change) {
        json r = json::array();
        for (const Scalar& c : row) r.push_back(to_json(c));
        lin.push_back(r);
    }
    return json{{"phi", to_json(pd.Phi)},
                {"x_nf", to_json(pd.X_nf)},
                {"resonant_support", support},
                {"torus", to_json(pd.torus)},
                {"gamma", gamma},
                {"linear_change", lin}};
}

nlohmann::json to_json(const ConservationReport& rep) {
    json residuals = json::array();
    for (const TensorValue& r : rep.residuals)
        residuals.push_back(std::visit([](const auto& t) { return to_json(t); }, r));
    json gauges = json::array();
    for (const Jet& g : rep.gauges) gauges.push_back(to_json(g));
    return json{{"hypothesis_ok", rep.hypothesis_ok},
                {"hypothesis_gauge", to_json(rep.hypothesis_gauge)},
                {"residuals", residuals},
                {"gauges", gauges},
                {"conserved", rep.conserved}};
}

nlohmann::json to_json(const ContactPreservationReport& rep) {
    return json{{"preserved", rep.preserved},
                {"residual", to_json(rep.residual)},
                {"f0_zero", rep.f0_zero},
                {"theta_independent", rep.theta_independent},
                {"f1_zero", rep.f1_zero}};
}

nlohmann::json to_json(const PrimitiveFormReport& rep) {
    json blocks = json::array();
    for (const PrimitiveBlock& b : rep.blocks)
        blocks.push_back(json{{"start", b.start}, {"size", b.size}, {"lambda", to_json(b.lambda)}, {"q_case", b.q_case}});
    json support = json::array();
    for (const auto& [m, w] : rep.residual_R_support) support.push_back(json{{"e", m.e}, {"weight", to_json(w)}});
    return json{{"matches_normal_form", rep.matches_normal_form},
                {"blocks", blocks},
                {"residual_R_support", support}};
}

std::string render_certificate(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

} // namespace nfkit
