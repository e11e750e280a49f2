#pragma once

#include <variant>

#include "nfkit/pdnormal.hpp"

namespace nfkit {

using TensorValue = std::variant<FormJet, MultiVectorJet>;

int tensor_nvars(const TensorValue& T);
int tensor_trunc(const TensorValue& T);
bool tensor_is_zero(const TensorValue& T);
TensorValue tensor_scale(const Jet& f, const TensorValue& T);
TensorValue tensor_sub(const TensorValue& a, const TensorValue& b);
TensorValue tensor_lie(const VectorFieldJet& X, const TensorValue& T);

// Omega / f with a best-effort cancellation of common coordinate factors.
struct RationalTensorJet {
    TensorValue numerator;
    Jet denominator;
    bool reduced = false;
};

RationalTensorJet make_rational(TensorValue numerator, Jet denominator);

// Transport to the linearizing chart, delete terms with nonzero weight under
// any generator, transport back. A projection.
TensorValue toric_average(const TensorValue& T, const FormalMap& Phi, const ToricAction& torus);
VectorFieldJet toric_average(const VectorFieldJet& X, const FormalMap& Phi, const ToricAction& torus);

enum class ConservationMode { Invariant, SemiInvariant };

struct ConservationReport {
    bool hypothesis_ok = false;
    Jet hypothesis_gauge;               // g with L_X Lambda = g Lambda (semi-invariant mode)
    std::vector<TensorValue> residuals; // numerator-level residual per generator
    std::vector<Jet> gauges;            // g_k per generator (semi-invariant mode)
    bool conserved = false;
};

ConservationReport verify_conservation(const VectorFieldJet& X_nf, const RationalTensorJet& Lambda,
                                       const ToricAction& torus, ConservationMode mode);

struct WalcherResult {
    Jet beta;               // unit; beta*F is a semi-invariant of X^s
    std::vector<Scalar> c;  // Z_k(beta F) = c_k beta F
    Scalar eigenvalue;      // X^s(beta F) = eigenvalue * beta F
};

WalcherResult walcher_gauge(const VectorFieldJet& X_nf, const Jet& F, int N);

} // namespace nfkit
