#pragma once

#include "nfkit/geonormal.hpp"

namespace nfkit {

enum class ContactKind { NonVanishing, Transversal, Tangential };

// Singular contact 1-form on 2n+1 variables; variable 0 is the distinguished
// coordinate theta, the x-block is 1..n and the conjugate block n+1..2n.
struct SingularContactJet {
    int n;
    ContactKind kind;
    int m; // tangency order, Tangential only (> 2)
    FormJet alpha;

    int nvars() const { return 2 * n + 1; }
    int trunc() const { return alpha.trunc(); }
};

// theta dtheta + (x_1+1)dx_{n+1} + sum_{k>=2} x_k dx_{n+k}.
SingularContactJet nonvanishing_contact_model(int n, int trunc);
// theta dtheta + sum_i (lambda_i x_i dx_{n+i} + (lambda_i - 1) x_{n+i} dx_i).
SingularContactJet transversal_contact_model(int n, const std::vector<Scalar>& lambda, int trunc);
// d(theta^m - x_1 theta) plus the transversal primitive part.
SingularContactJet tangential_contact_model(int n, int m, const std::vector<Scalar>& lambda, int trunc);

struct ContactPreservationReport {
    bool preserved = false;
    FormJet residual; // L_X alpha
    bool f0_zero = false;
    bool theta_independent = false;
    bool f1_zero = false; // tangential case: the divisor function is constant along X
};

ContactPreservationReport verify_contact_preservation(const VectorFieldJet& X, const SingularContactJet& alpha);

struct HamiltonianReport {
    Jet H; // i_X alpha, with i_X(d gamma) = -dH
    bool independent_x1 = false;
    bool degree_relation = false; // every monomial has sum_{i=2..n} l_i = 1
};

HamiltonianReport extract_hamiltonian(const VectorFieldJet& X, const SingularContactJet& alpha);

NormalizationCertificate simul_normalize_transversal_contact(const VectorFieldJet& X,
                                                             const SingularContactJet& alpha, int N);
NormalizationCertificate simul_normalize_tangential_contact(const VectorFieldJet& X,
                                                            const SingularContactJet& alpha, int N);

// One eigenvalue block of a primitive 1-form; q_case 0 is Q = 0, 1 the shift
// chain sum x_{j+1} x_{n+j}, 2 the square x_{n_i+n}^2, 3 the chain with square
// tail, 4 the odd chain without tail.
struct PrimitiveBlock {
    int start; // 0-based first x-index of the block
    int size;
    Scalar lambda;
    int q_case;
};

struct PrimitiveFormReport {
    bool matches_normal_form = false;
    std::vector<PrimitiveBlock> blocks;
    std::vector<std::pair<Monomial, Scalar>> residual_R_support; // monomial, witness sum a_i l_i
};

// Recognizer for the primitive normal form on 2n variables; lambda holds the
// first n eigenvalues (the conjugates are 1 - lambda_i).
PrimitiveFormReport check_primitive_normal_form(const FormJet& gamma, const std::vector<Scalar>& lambda);

} // namespace nfkit
