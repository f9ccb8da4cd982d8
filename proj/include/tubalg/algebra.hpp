#pragma once

#include "tubalg/transform.hpp"

namespace tubalg {

// Relative threshold below which a transform-domain magnitude counts as zero.
// Shared by the weak inverse, the pseudoinverse and every rank function.
inline constexpr double kZeroTubeTol = 1e-10;

// Tube product under the transform: (a_hat .* b_hat) brought back to the
// spatial domain. Commutative and associative.
Tube tube_mul(const Tube& a, const Tube& b, const Transform& t);

// Tensor-tensor product: one mode-3 pass into the transform domain, a
// facewise multiply, and a mode-3 pass back. For real-ring transforms and
// real operands the result is real and returned with zero imaginary parts.
Tensor3 starm(const Tensor3& a, const Tensor3& b, const Transform& t);

// Tube-tensor product b * a: every tube fiber of a is multiplied by b.
Tensor3 tube_scale(const Tube& b, const Tensor3& a, const Transform& t);

// Slice-wise Hermitian transpose carried through the transform domain.
Tensor3 conj_transpose(const Tensor3& a, const Transform& t);

// The m x m x n identity of the product: all transform slices equal I_m.
Tensor3 identity_tensor(Eigen::Index m, const Transform& t);

bool is_unitary(const Tensor3& q, const Transform& t, double tol);

// Entrywise reciprocal in the transform domain above tol * max magnitude,
// zero otherwise. s * s^+ is idempotent and s * s^+ * s == s.
Tube tube_weak_inverse(const Tube& s, const Transform& t, double tol = kZeroTubeTol);

// Direct block-circulant t-product. Reference implementation: agrees with
// starm under the unnormalized DFT.
Tensor3 t_product_circulant(const Tensor3& a, const Tensor3& b);

}  // namespace tubalg
