#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "tubalg/tensor3.hpp"

namespace tubalg {

// Per-row conjugacy: a row is either real or the entrywise conjugate of
// exactly one other row. partner == own index for real rows.
struct RowPairing {
    bool self_real = true;
    Eigen::Index partner = -1;
};

// The principal-idempotent grouping of the ring: a partition of [n] into
// ell groups of size d_j in {1,2}, one group per idempotent e_j.
struct IdempotentStructure {
    Eigen::Index ell = 0;
    std::vector<std::vector<Eigen::Index>> groups;  // sorted slice indices per group
    std::vector<Eigen::Index> tau;                  // slice -> group
    std::vector<int> degrees;                       // d_j
};

enum class ViolationKind { cross_group, in_group_non_orthogonal, unequal_norms };

struct GramViolation {
    ViolationKind kind;
    Eigen::Index s = -1, t = -1;
    Complex gram{0.0, 0.0};
};

// Certificate that M factors (up to row permutation) as D*Q with Q unitary
// conjugate-paired and D positive groupwise-constant: equivalently, rows of M
// are pairwise orthogonal and paired rows share a common norm mu_j.
struct EckartYoungCertificate {
    bool valid = false;
    std::vector<double> mu;  // one per group, present iff valid
    std::optional<GramViolation> violation;
};

/// An invertible n x n transform with its inverse, conjugacy pairing,
/// idempotent group structure and Eckart-Young certificate. Immutable.
class Transform {
public:
    // Validates invertibility (condition estimate <= 1e12), detects the
    // row pairing within tol, derives the group structure and computes the
    // certificate. A matrix that is invertible but fails the pairing test is
    // still returned, flagged as not a real ring.
    static Transform build(Eigen::MatrixXcd m, double tol = 1e-10, std::string id = "custom");

    Eigen::Index size() const { return n_; }
    const std::string& id() const { return id_; }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    const Eigen::MatrixXcd& inverse() const { return minv_; }
    const std::vector<RowPairing>& pairing() const { return pairing_; }
    double gram_diag_tolerance() const { return tol_; }

    bool is_real_ring() const { return real_ring_; }
    void require_real_ring() const {
        if (!real_ring_)
            throw NotRealRingError("transform '" + id_ + "' does not define a real tubal ring");
    }

    const IdempotentStructure& structure() const { return structure_; }
    const std::optional<EckartYoungCertificate>& certificate() const { return cert_; }
    bool is_valid_dq() const { return cert_ && cert_->valid; }

    // Principal idempotent e_j: the sum of the d_j columns of M^-1 indexed by
    // group j. Its transform image is the 0/1 indicator of the group.
    Tube idempotent_tube(Eigen::Index j) const;

    // Multiplicative identity tube (sum of all idempotents).
    Tube identity_tube() const;

private:
    Transform() = default;

    Eigen::Index n_ = 0;
    std::string id_;
    Eigen::MatrixXcd m_, minv_;
    std::vector<RowPairing> pairing_;
    bool real_ring_ = false;
    IdempotentStructure structure_;
    std::optional<EckartYoungCertificate> cert_;
    double tol_ = 1e-10;
};

// Revalidates the certificate at a caller-chosen tolerance. Requires a real
// ring. Scans row pairs (s < t) in index order and reports the first
// violating Gram entry; when all rows are orthogonal, checks groupwise norm
// equality and reports mu on success.
EckartYoungCertificate check_eckart_young(const Transform& t, double tol);

// ---- builtin transforms ----

Transform identity_transform(Eigen::Index n);
// Unnormalized DFT, rows omega^(jk) with omega = exp(-2*pi*i/n); mu_j = sqrt(n).
Transform dft_transform(Eigen::Index n);
// Orthonormal DCT-II; all rows real, mu_j = 1.
Transform dct_transform(Eigen::Index n);
// Random valid M = D*Q: conjugate-paired unitary Q from a seeded orthogonal
// matrix, positive groupwise scales D. Deterministic per seed.
Transform random_valid_transform(Eigen::Index n, std::uint64_t seed);
// Multiplies the rows of group j by weights[j] (> 0), preserving pairing and
// certificate validity.
Transform scaled_transform(const Transform& t, const std::vector<double>& weights);

// ---- transform-domain movement ----

Tensor3 to_transform_domain(const Tensor3& x, const Transform& t);
// enforce_real: result is known real (conjugate-symmetric hat data); drop
// imaginary parts below 1e-9 relative, raise InternalConsistencyError above.
Tensor3 from_transform_domain(const Tensor3& xhat, const Transform& t, bool enforce_real);

Tube to_transform_domain(const Tube& a, const Transform& t);
Tube from_transform_domain(const Tube& ahat, const Transform& t, bool enforce_real);

}  // namespace tubalg
