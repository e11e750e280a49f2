#pragma once

#include <json.hpp>

#include "nfkit/contact.hpp"
#include "nfkit/parse.hpp"
#include "nfkit/toriclaw.hpp"

namespace nfkit {

// Exact JSON renderings: rationals as strings, exponent vectors as integer
// arrays, canonical (graded-lex) term order throughout.
nlohmann::json to_json(const Scalar& c);
nlohmann::json to_json(const Jet& f);
nlohmann::json to_json(const FormalMap& phi);
nlohmann::json to_json(const VectorFieldJet& X);
nlohmann::json to_json(const FormJet& w);
nlohmann::json to_json(const MultiVectorJet& w);
nlohmann::json to_json(const LogFormJet& w);
nlohmann::json to_json(const StructureValue& S);
nlohmann::json to_json(const ToricAction& act);
nlohmann::json to_json(const NormalizationCertificate& cert);
nlohmann::json to_json(const PDResult& pd);
nlohmann::json to_json(const ConservationReport& rep);
nlohmann::json to_json(const ContactPreservationReport& rep);
nlohmann::json to_json(const PrimitiveFormReport& rep);

// Stable byte rendering used for certificate files.
std::string render_certificate(const nlohmann::json& doc);

} // namespace nfkit
