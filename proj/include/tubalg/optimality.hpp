#pragma once

#include <optional>

#include "tubalg/tsvdm.hpp"

namespace tubalg {

enum class WitnessKind { real_gram, imag_gram, random_search };

// A concrete Eckart-Young violation: a real tensor x whose tubal-length
// truncation is beaten by `better` (same length bound) with margin `gap`.
struct CounterexampleWitness {
    WitnessKind kind = WitnessKind::random_search;
    Eigen::Index group = -1;
    Eigen::Index s = -1, s_prime = -1;   // slice indices of the group
    Complex gram{0.0, 0.0};              // g_{s',s} of (M M^H)^-1
    double big_s = 0.0;                  // g_{s,s} + g_{s',s'}
    Complex alpha{0.0, 0.0};
    double a_scale = 1.0;
    std::vector<Eigen::Index> lambda;    // target tubal-length
    Tensor3 x;
    Tensor3 better;
    double err_trunc = 0.0;              // ||x - truncate(x, lambda)||_F
    double err_better = 0.0;             // ||x - better||_F
    double gap = 0.0;                    // err_trunc - err_better
};

// Samples `trials` random tensors of tubal-length <= lambda (random factors,
// local perturbations and component swaps in the transform domain, all
// conjugate-symmetrized) and reports the first one beating the truncation by
// more than 1e-9. Each competitor is fully determined by (seed, trial index).
// max_improvement, when given, receives the largest improvement seen.
std::optional<CounterexampleWitness> refute_random(const Tensor3& x, const Transform& t,
                                                   const std::vector<Eigen::Index>& lambda,
                                                   Eigen::Index trials, std::uint64_t seed,
                                                   double* max_improvement = nullptr);

// Closed-form witness for a degree-2 group whose Gram-inverse cross term has
// a nonzero real part: the 2x2xn tensor with alpha_2 = i*sqrt((S-2Re g)/(S+Re g))
// on the paired slices. The squared errors of the two candidate
// approximations differ by the factor (S+2Re g)/(S+Re g).
CounterexampleWitness counterexample_real_gram(const Transform& t, Eigen::Index group);

// Closed-form witness for Re g = 0, Im g != 0: x = a*x1 + x2 with
// alpha = (1-i)/sqrt(2) and a = sqrt((S+2Im g)/(S-Im g)); the squared errors
// differ by the factor a^2*(S-2Im g)/(S+2Im g).
CounterexampleWitness counterexample_imag_gram(const Transform& t, Eigen::Index group);

struct FixedRankComparison {
    double err_q = 0.0;       // ||x - truncation under q||_F
    double err_dq = 0.0;      // ||x - truncation under dq||_F
    double trunc_diff = 0.0;  // ||truncation(q) - truncation(dq)||_F
};
// Same-rank truncations under a unitary transform and its row-scaled variant
// coincide; this computes both and their difference for verification.
FixedRankComparison compare_fixed_rank(const Tensor3& x, const Transform& q,
                                       const Transform& dq, const RankSpec& spec);

struct GammaComparison {
    Eigen::Index r_gamma_q = 0;
    Eigen::Index r_gamma_dq = 0;
};
// Energy-threshold ranks under both transforms with retained energy measured
// in the original domain (see r_gamma_original_domain); under that measure
// r_gamma_q <= r_gamma_dq holds whenever q is unitary and dq scales its rows.
GammaComparison compare_gamma(const Tensor3& x, const Transform& q, const Transform& dq,
                              double gamma);

// ---- certification report ----

enum class Verdict { certificate_only, confirmed_valid, refuted_invalid };

struct EckartYoungReport {
    std::string transform_id;
    EckartYoungCertificate certificate;
    Verdict verdict = Verdict::certificate_only;
    Eigen::Index trials = 0;
    double max_violation = 0.0;  // best improvement seen by the random search
    std::optional<CounterexampleWitness> witness;
};

struct CertifyOptions {
    bool refute = false;
    std::optional<Tensor3> tensor;  // input for the random search; generated when absent
    Eigen::Index trials = 10000;
    std::uint64_t seed = 0;
    double tol = 1e-10;
};

EckartYoungReport certify(const Transform& t, const CertifyOptions& opts);

// ---- crafted transforms (tests, gen subcommand) ----

// Conjugate-pair transform (embedded at slices 0,1 of an n x n matrix, extra
// rows are scaled identity rows) whose Gram-inverse block is
// [[S/2, conj(g)], [g, S/2]]. Requires |g| < S/2. g = 0 yields a valid
// transform; Re g != 0 or Im g != 0 yields the matching invalid family.
Transform conj_pair_transform(double big_s, Complex g, Eigen::Index n = 2);

}  // namespace tubalg
