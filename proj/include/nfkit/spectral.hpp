#pragma once

#include <utility>

#include "nfkit/jet.hpp"
#include "nfkit/linalg.hpp"

namespace nfkit {

struct JordanBlock {
    Scalar eigenvalue;
    int size;
};

struct EigenData {
    std::vector<Scalar> eigenvalues; // with multiplicity, column order of the basis
    Mat change_of_basis;             // C with C^-1 L C in Jordan form
    std::vector<JordanBlock> jordan_blocks;
};

struct SNDecomposition {
    Mat S;
    Mat N_part;
    EigenData eig;
};

// Exact Jordan / semisimple-nilpotent decomposition over Q(i).
SNDecomposition sn_decomposition(const Mat& L);

struct ResonanceLattice {
    int trunc;
    std::vector<std::pair<Monomial, int>> vf_resonances; // <alpha,gamma> = gamma_i, |alpha| >= 2
    std::vector<Monomial> kernel_monomials;              // <alpha,gamma> = 0, |alpha| <= N
};

ResonanceLattice resonance_lattice(const std::vector<Scalar>& gamma, int N);

struct ToricAction {
    int tau = 0;
    std::vector<Scalar> rho;
    std::vector<std::vector<long>> Z; // tau x n, rows primitive, HNF-canonical

    int nvars() const { return Z.empty() ? 0 : static_cast<int>(Z[0].size()); }
};

ToricAction toric_generators(const std::vector<Scalar>& gamma);

// <alpha, gamma> over Q(i).
Scalar monomial_pairing(const Monomial& alpha, const std::vector<Scalar>& gamma);
// Integer weight <alpha, Z_k>.
long monomial_weight(const Monomial& alpha, const std::vector<long>& zrow);

// All monomials in n variables with lo <= degree <= hi, in graded-lex order.
std::vector<Monomial> enumerate_monomials(int nvars, int lo, int hi);

// Joint eigenbasis of a family of commuting semisimple matrices; nullopt when
// some spectrum leaves Q(i) or a matrix is not diagonalizable.
std::optional<Mat> joint_diagonalize(const std::vector<Mat>& mats);

} // namespace nfkit
