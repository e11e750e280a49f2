#pragma once

#include "nfkit/spectral.hpp"
#include "nfkit/tensor.hpp"
#include "nfkit/tpoly.hpp"

namespace nfkit {

struct HomologicalSplit {
    VectorFieldJet U;
    VectorFieldJet V_res;
};

// Split a homogeneous degree-d field as V = [L, U] + V_res with V_res in the
// kernel of ad of the semisimple part of L and U off that kernel.
HomologicalSplit homological_solve(const VectorFieldJet& V, const Mat& L);

struct PDResult {
    VectorFieldJet X_nf;
    FormalMap Phi; // pushforward(Phi, X_input) = X_nf
    std::vector<std::pair<Monomial, int>> resonant_support; // nonlinear terms present
    ToricAction torus;
    std::vector<Scalar> gamma; // eigenvalues in the normalized chart
    Mat linear_change;         // Jordan-basis change used by Phi's linear part
};

PDResult pd_normalize(const VectorFieldJet& X, int N);

// As pd_normalize, but every homogeneous correction must lie in the joint
// kernel of ad of the given diagonal linear fields (entries per coordinate,
// in the normalized chart).
PDResult pd_normalize_constrained(const VectorFieldJet& X, int N, const std::vector<Vec>& diagonals);

PDResult equivariant_pd_normalize(const VectorFieldJet& X, const ToricAction& weights, int N);

// Hamiltonian field of F with respect to a constant symplectic form.
VectorFieldJet hamiltonian_field(const Jet& F, const FormJet& omega0);

struct BirkhoffResult {
    Jet H_nf;
    FormalMap Phi; // H_nf = H o Phi^-1; pullback(Phi, omega0) = omega0
    std::vector<Scalar> gamma;
};

BirkhoffResult birkhoff_normalize(const Jet& H, const FormJet& omega0, int N);

// True when every nonlinear term x^alpha d_i of X satisfies <alpha,gamma> = gamma_i.
bool is_resonant_field(const std::vector<Scalar>& gamma, const VectorFieldJet& X);

} // namespace nfkit
