#pragma once

#include <optional>
#include <variant>

#include "nfkit/pdnormal.hpp"

namespace nfkit {

enum class StructureTag { FoldedVolume, LogNambuTop, MultiFoldedSymplectic, LogSymplectic };

struct StructureKind {
    StructureTag tag;
    int param = 0; // m for MultiFoldedSymplectic, k for LogSymplectic
};

using StructureValue = std::variant<FormJet, MultiVectorJet, LogFormJet>;

bool structure_is_zero(const StructureValue& S);

// Canonical models. Multi-folded layout: coordinates 0..2m-1 fold in pairs
// (i, m+i), the rest are symplectic pairs (2m+j, 2m+(n-m)+j). Log-symplectic
// layout: (x_i, y_i) at (2i, 2i+1) for i < k, then symplectic z pairs.
FormJet folded_volume_model(int nvars, int trunc);
MultiVectorJet log_nambu_model(int nvars, int trunc);
FormJet multifolded_model(int nvars, int m, int trunc);
LogFormJet log_symplectic_model(int nvars, int k, int trunc);

struct ResonanceReport {
    std::vector<Scalar> values; // each must vanish exactly
    bool ok = true;
};

struct NormalizationCertificate {
    FormalMap Phi; // original chart -> normalized chart
    VectorFieldJet X_nf;
    StructureValue structure_nf;
    StructureValue structure_residual; // structure_nf minus the canonical model
    VectorFieldJet dynamics_residual;  // [X^s, X_nf]
    std::vector<Scalar> gamma;
    ToricAction torus;
    ResonanceReport resonance;

    bool valid() const;
};

// Coordinates y with Omega = y_1 dy_1 ^ ... ^ dy_n; pullback(Phi, model) = Omega.
FormalMap canon_folded_volume(const FormJet& Omega, int N);

// Coordinates with Lambda = x_1 d_1 ^ ... ^ d_n; pushforward(Phi, Lambda) = model.
FormalMap canon_log_nambu(const MultiVectorJet& Lambda, int N);

// Order-by-order Moser path solver: Phi with transport(Phi, G1) = G0. With
// weights, the generator is projected onto weight-zero monomials.
FormalMap moser_path_solve(const StructureValue& G0, const StructureValue& G1, StructureKind kind,
                           const std::optional<ToricAction>& weights, int N);

NormalizationCertificate simul_normalize_folded_volume(const VectorFieldJet& X, const FormJet& Omega, int N);
NormalizationCertificate simul_normalize_log_nambu(const VectorFieldJet& X, const MultiVectorJet& Lambda, int N);

// X(O) != 0: coordinates with X = d/dx_n and the structure canonical.
NormalizationCertificate rectify_with_structure(const VectorFieldJet& X, const StructureValue& S, int N);

// quasi_euler is the quasi-Euler field of the input chart (weights 2 on the
// fold block, 3 on the symplectic block); L_E omega = 6 omega is checked.
FormalMap equivariant_canon_multifolded(const FormJet& omega, const VectorFieldJet& quasi_euler,
                                        const ToricAction& weights, int m, int N);
NormalizationCertificate simul_normalize_multifolded(const VectorFieldJet& X, const FormJet& omega, int N);

FormalMap canon_log_symplectic(const LogFormJet& omega, const std::optional<ToricAction>& weights, int N);
NormalizationCertificate simul_normalize_log_symplectic(const VectorFieldJet& X, const LogFormJet& omega, int N);

} // namespace nfkit
