#pragma once

#include <optional>
#include <vector>

#include "nfkit/scalar.hpp"

namespace nfkit {

using Vec = std::vector<Scalar>;
using Mat = std::vector<std::vector<Scalar>>; // row-major, square unless noted

Mat mat_identity(int n);
Mat mat_zero(int rows, int cols);
Mat mat_mul(const Mat& a, const Mat& b);
Mat mat_add(const Mat& a, const Mat& b);
Mat mat_sub(const Mat& a, const Mat& b);
Mat mat_transpose(const Mat& a);
Vec mat_vec(const Mat& a, const Vec& v);
bool mat_is_zero(const Mat& a);
std::optional<Mat> mat_inverse(const Mat& a);
Scalar mat_det(Mat a);
int mat_rank(Mat a);

// One solution of A x = b with free variables set to zero; nullopt if inconsistent.
std::optional<Vec> solve_linear(Mat A, Vec b);
// Deterministic basis of the right kernel.
std::vector<Vec> nullspace(const Mat& A);

// Monic characteristic polynomial of L, coefficients c[0..n] with c[n] = 1,
// p(t) = sum c[k] t^k (Faddeev-LeVerrier, exact).
std::vector<Scalar> charpoly(const Mat& L);

// All roots (with multiplicity) of a monic polynomial over Q(i), or nullopt if
// it does not split over Q(i). Roots sorted by (re, im).
std::optional<std::vector<Scalar>> roots_in_gaussian_rationals(std::vector<Scalar> poly);

// Symplectic Gram-Schmidt: A antisymmetric invertible 2m x 2m Gram matrix;
// returns P with P^T A P equal to the canonical matrix of sum e_i ^ e_{m+i}.
// Only combines coordinates inside the pairing classes induced by A's sparsity,
// so diagonal group actions compatible with A stay diagonal.
std::optional<Mat> symplectic_gram_schmidt(const Mat& A);

// Incremental independent-set tracker over Q(i) (row echelon).
class SpanTracker {
public:
    // Returns true (and absorbs v) iff v is independent of the current span.
    bool add(Vec v);
    bool contains(Vec v) const;
    int dim() const { return static_cast<int>(rows_.size()); }

private:
    Vec reduce(Vec v) const;
    std::vector<Vec> rows_; // echelon rows, leading entry 1
};

} // namespace nfkit
