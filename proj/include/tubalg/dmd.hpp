#pragma once

#include "tubalg/tsvdm.hpp"

namespace tubalg {

// Rank budget for the fit: any truncation spec, or an energy fraction routed
// through the adaptive truncation.
struct EnergyRank {
    double gamma = 1.0;
};
using DmdRankSpec = std::variant<TRank, MultiRank, TubalLength, EnergyRank>;

/// Fitted tubal DMD model. z_modes holds the DMD modes (columns are
/// unitary under the product), t_upper the facewise Schur factor (upper
/// triangular in every transform slice). Both are stored as spatial tensors;
/// their entries are complex in general even for real data - only products
/// of the form Z * T^k * Z^H map real inputs to real outputs.
struct DmdModel {
    std::string transform_id;
    Tensor3 z_modes;                     // m x r_tilde x n
    Tensor3 t_upper;                     // r_tilde x r_tilde x n
    std::vector<Eigen::Index> rank_used; // resolved per-slice rank
    Eigen::Index r_tilde = 0;
    double fit_error = 0.0;              // ||A*X_train - X_next|| / ||X_next||
};

// Fits the evolution operator of snapshot data x (lateral slices are the
// p+1 time snapshots): factereize X_train = x[:,1:p] via the tSVDM truncated
// to `spec`, form K = U^H * X_next * V * S^+, take its facewise Schur
// decomposition K = W * T * W^H (one Schur per group, conjugated onto the
// paired slice) and set Z = U * W. The operator is A = Z * T * Z^H.
DmdModel tdmd_fit(const Tensor3& x, const Transform& t, const DmdRankSpec& spec);

// Entrywise reciprocal of the transform-domain diagonal above
// tol * (max diagonal magnitude), zero otherwise. S * S^+ * S == S.
Tensor3 pseudo_inverse_fdiag(const Tensor3& s, const Transform& t, double tol = kZeroTubeTol);

// Lateral slice k of the result is A^k applied to x0, evaluated as
// Z * T^k * (Z^H * x0) without materializing A. steps == 0 gives an
// m x 0 x n tensor.
Tensor3 tdmd_predict(const DmdModel& model, const Transform& t, const Tensor3& x0,
                     Eigen::Index steps);

// Materializes A = Z * T * Z^H (real for real-ring transforms).
Tensor3 dmd_operator(const DmdModel& model, const Transform& t);

// Lateral slab x[:, j0 : j0+count, :].
Tensor3 lateral_slab(const Tensor3& x, Eigen::Index j0, Eigen::Index count);

}  // namespace tubalg
