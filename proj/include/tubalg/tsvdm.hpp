#pragma once

#include <variant>
#include <vector>

#include "tubalg/algebra.hpp"

namespace tubalg {

/// Full tSVDM factor triple. u, s, v are spatial-domain real tensors
/// (m x m x n, m x p x n f-diagonal, p x p x n); s_hat holds the
/// transform-domain singular values, row j = tube index, column k = slice.
///
/// The facewise SVD is computed once per idempotent group on a representative
/// slice and conjugated onto the paired slice, so s_hat is exactly constant
/// across each group and the spatial factors come out real.
struct TsvdmFactors {
    Tensor3 u, s, v;
    Eigen::MatrixXd s_hat;  // min(m,p) x n
    std::string transform_id;
    Eigen::Index m = 0, p = 0, n = 0;
};

struct TRank {
    Eigen::Index r = 0;
};
struct MultiRank {
    std::vector<Eigen::Index> r;  // length n, must be constant within groups
};
struct TubalLength {
    std::vector<Eigen::Index> lambda;  // length ell
};
using RankSpec = std::variant<TRank, MultiRank, TubalLength>;

TsvdmFactors tsvdm(const Tensor3& x, const Transform& t);

// Count of tube indices whose max transform magnitude over slices clears
// tol * (global max singular value).
Eigen::Index t_rank(const TsvdmFactors& f, double tol = kZeroTubeTol);

// Per-slice ranks; group-constant by construction of s_hat.
std::vector<Eigen::Index> multirank(const TsvdmFactors& f, double tol = kZeroTubeTol);
Eigen::Index implicit_rank(const TsvdmFactors& f, double tol = kZeroTubeTol);

// Per-group ranks; satisfies lambda[tau(k)] == multirank[k].
std::vector<Eigen::Index> tubal_length(const TsvdmFactors& f, const Transform& t,
                                       double tol = kZeroTubeTol);

// The order-preserving bijection between valid multiranks and tubal-lengths.
std::vector<Eigen::Index> length_to_multirank(const std::vector<Eigen::Index>& lambda,
                                              const IdempotentStructure& st);
// Throws InvalidMultirankError when r is not constant within a group.
std::vector<Eigen::Index> multirank_to_length(const std::vector<Eigen::Index>& r,
                                              const IdempotentStructure& st);

// Resolves any RankSpec to a validated per-slice rank vector.
std::vector<Eigen::Index> resolve_rank_spec(const RankSpec& spec, const Transform& t,
                                            Eigen::Index m, Eigen::Index p);

// Multirank-style truncation (t-rank and tubal-length specs route through the
// corresponding per-slice vector). Returns a real spatial tensor.
Tensor3 truncate(const TsvdmFactors& f, const Transform& t, const RankSpec& spec);

// Closed-form squared truncation error: sum over slices of
// mu_tau(k)^-2 * (tail of s_hat(:,k)^2). Requires a valid certificate.
double truncation_error(const TsvdmFactors& f, const Transform& t, const RankSpec& spec);

// Energy-adaptive multirank truncation: sorts all squared transform-domain
// singular values, finds the smallest prefix holding a gamma fraction of the
// energy, and keeps every entry at least as large as the cutoff.
struct Tsvdm2Result {
    Tensor3 approx;
    std::vector<Eigen::Index> rho;
    Eigen::Index r_gamma = 0;
    double retained_energy = 1.0;
};
Tsvdm2Result tsvdm2(const Tensor3& x, const Transform& t, double gamma);

// Minimal number of retained components, walking entries in the transform's
// energy order, until a gamma fraction of the ORIGINAL-domain energy is
// retained (tails weighted by mu_tau(k)^-2). Coincides with the adaptive
// truncation's r_gamma when all mu are equal; this is the quantity that is
// monotone under row scaling of the transform. Requires a valid certificate.
Eigen::Index r_gamma_original_domain(const TsvdmFactors& f, const Transform& t, double gamma);

// Factors with columns cut to r_tilde = max_k r_k and per-slice singular
// values beyond r_k zeroed; the compact form used by the DMD fit and for
// storage accounting.
struct TruncatedFactors {
    Tensor3 u, s, v;
    std::vector<Eigen::Index> rk;
    Eigen::Index r_tilde = 0;
};
TruncatedFactors truncate_factors(const TsvdmFactors& f, const Transform& t,
                                  const RankSpec& spec);

}  // namespace tubalg
