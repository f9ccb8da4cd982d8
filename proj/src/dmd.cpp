#include "tubalg/dmd.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace tubalg {

Tensor3 lateral_slab(const Tensor3& x, Eigen::Index j0, Eigen::Index count) {
    if (j0 < 0 || count < 0 || j0 + count > x.cols())
        throw ShapeError("lateral_slab: column range out of bounds");
    Tensor3 out(x.rows(), count, x.tubes(), x.domain(), x.transform_id());
    for (Eigen::Index k = 0; k < x.tubes(); ++k)
        for (Eigen::Index j = 0; j < count; ++j)
            for (Eigen::Index i = 0; i < x.rows(); ++i) out.at(i, j, k) = x.at(i, j0 + j, k);
    return out;
}

Tensor3 pseudo_inverse_fdiag(const Tensor3& s, const Transform& t, double tol) {
    if (s.tubes() != t.size()) throw ShapeError("pseudo_inverse_fdiag: tube length mismatch");
    const Tensor3 shat = to_transform_domain(s, t);
    const Eigen::Index q = std::min(s.rows(), s.cols());
    double dmax = 0.0;
    for (Eigen::Index k = 0; k < s.tubes(); ++k)
        for (Eigen::Index j = 0; j < q; ++j) dmax = std::max(dmax, std::abs(shat.at(j, j, k)));
    Tensor3 phat(s.cols(), s.rows(), s.tubes(), Domain::transform, t.id());
    for (Eigen::Index k = 0; k < s.tubes(); ++k)
        for (Eigen::Index j = 0; j < q; ++j) {
            const Complex d = shat.at(j, j, k);
            if (std::abs(d) > tol * dmax) phat.at(j, j, k) = 1.0 / d;
        }
    const bool real_result = t.is_real_ring() &&
                             s.max_imag_abs() <= 1e-12 * std::max(1.0, s.max_abs());
    return from_transform_domain(phat, t, real_result);
}

namespace {

struct HatTriple {
    Tensor3 u, s, v;
};

HatTriple hat_factors(const TruncatedFactors& tf, const Transform& t) {
    return {to_transform_domain(tf.u, t), to_transform_domain(tf.s, t),
            to_transform_domain(tf.v, t)};
}

}  // namespace

DmdModel tdmd_fit(const Tensor3& x, const Transform& t, const DmdRankSpec& spec) {
    t.require_real_ring();
    if (x.cols() < 2) throw ShapeError("tdmd_fit: need at least two snapshots");
    const Eigen::Index p = x.cols() - 1;
    const Tensor3 x_train = lateral_slab(x, 0, p);
    const Tensor3 x_next = lateral_slab(x, 1, p);
    const double next_norm = frob_norm(x_next);
    if (frob_norm(x_train) == 0.0)
        throw std::invalid_argument("tdmd_fit: training snapshots are all zero");

    const TsvdmFactors f = tsvdm(x_train, t);
    RankSpec rank_spec;
    if (const auto* er = std::get_if<EnergyRank>(&spec)) {
        rank_spec = MultiRank{tsvdm2(x_train, t, er->gamma).rho};
    } else if (const auto* tr = std::get_if<TRank>(&spec)) {
        rank_spec = *tr;
    } else if (const auto* mr = std::get_if<MultiRank>(&spec)) {
        rank_spec = *mr;
    } else {
        rank_spec = std::get<TubalLength>(spec);
    }
    const TruncatedFactors tf = truncate_factors(f, t, rank_spec);
    const Eigen::Index r = tf.r_tilde;

    DmdModel model;
    model.transform_id = t.id();
    model.rank_used = tf.rk;
    model.r_tilde = r;

    const Eigen::Index n = t.size();
    Tensor3 zhat(x.rows(), r, n, Domain::transform, t.id());
    Tensor3 that(r, r, n, Domain::transform, t.id());

    if (r > 0) {
        const HatTriple hf = hat_factors(tf, t);
        const Tensor3 next_hat = to_transform_domain(x_next, t);

        // K per slice, then one Schur decomposition per group.
        const IdempotentStructure& st = t.structure();
        const double smax = f.s_hat.maxCoeff();
        parallel_for(static_cast<std::size_t>(st.ell), [&](std::size_t gj) {
            const auto& group = st.groups[gj];
            const Eigen::Index k = group[0];
            Eigen::MatrixXcd spinv = Eigen::MatrixXcd::Zero(r, r);
            for (Eigen::Index j = 0; j < r; ++j) {
                const Complex d = hf.s.at(j, j, k);
                if (std::abs(d) > kZeroTubeTol * smax) spinv(j, j) = 1.0 / d;
            }
            const Eigen::MatrixXcd kk = hf.u.slice(k).adjoint() * next_hat.slice(k) *
                                        hf.v.slice(k) * spinv;
            Eigen::ComplexSchur<Eigen::MatrixXcd> schur(kk, true);
            const Eigen::MatrixXcd w = schur.matrixU();
            const Eigen::MatrixXcd tt = schur.matrixT();
            zhat.slice(k) = hf.u.slice(k) * w;
            that.slice(k) = tt;
            if (group.size() == 2) {
                zhat.slice(group[1]) = (hf.u.slice(k) * w).conjugate();
                that.slice(group[1]) = tt.conjugate();
            }
        });
    }

    model.z_modes = from_transform_domain(zhat, t, false);
    model.t_upper = from_transform_domain(that, t, false);

    // Residual of the one-step map on the training pairs.
    Tensor3 res_hat(x.rows(), p, n, Domain::transform, t.id());
    {
        const Tensor3 train_hat = to_transform_domain(x_train, t);
        const Tensor3 next_hat = to_transform_domain(x_next, t);
        for (Eigen::Index k = 0; k < n; ++k) {
            if (r > 0) {
                const Eigen::MatrixXcd a_k =
                    zhat.slice(k) * that.slice(k) * zhat.slice(k).adjoint();
                res_hat.slice(k) = a_k * train_hat.slice(k) - next_hat.slice(k);
            } else {
                res_hat.slice(k) = -next_hat.slice(k);
            }
        }
    }
    const double res = frob_norm(from_transform_domain(res_hat, t, false));
    model.fit_error = (next_norm > 0.0) ? res / next_norm : res;
    return model;
}

Tensor3 tdmd_predict(const DmdModel& model, const Transform& t, const Tensor3& x0,
                     Eigen::Index steps) {
    if (t.id() != model.transform_id)
        throw ShapeError("tdmd_predict: transform does not match the fitted model");
    if (x0.rows() != model.z_modes.rows() || x0.cols() != 1 || x0.tubes() != t.size())
        throw ShapeError("tdmd_predict: state must be m x 1 x n");
    if (steps < 0) throw ShapeError("tdmd_predict: steps must be >= 0");

    const Eigen::Index m = x0.rows(), n = t.size(), r = model.r_tilde;
    Tensor3 out_hat(m, steps, n, Domain::transform, t.id());
    if (steps == 0 || r == 0) {
        const bool real_in = t.is_real_ring() &&
                             x0.max_imag_abs() <= 1e-12 * std::max(1.0, x0.max_abs());
        return from_transform_domain(out_hat, t, real_in && steps > 0);
    }

    const Tensor3 zhat = to_transform_domain(model.z_modes, t);
    const Tensor3 that = to_transform_domain(model.t_upper, t);
    const Tensor3 x0hat = to_transform_domain(x0, t);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::VectorXcd c = zhat.slice(k).adjoint() * x0hat.slice(k).col(0);
        for (Eigen::Index s = 0; s < steps; ++s) {
            c = that.slice(k) * c;
            out_hat.slice(k).col(s) = zhat.slice(k) * c;
        }
    }
    const bool real_in = t.is_real_ring() &&
                         x0.max_imag_abs() <= 1e-12 * std::max(1.0, x0.max_abs());
    return from_transform_domain(out_hat, t, real_in);
}

Tensor3 dmd_operator(const DmdModel& model, const Transform& t) {
    if (t.id() != model.transform_id)
        throw ShapeError("dmd_operator: transform does not match the fitted model");
    const Eigen::Index m = model.z_modes.rows(), n = t.size();
    Tensor3 ahat(m, m, n, Domain::transform, t.id());
    if (model.r_tilde > 0) {
        const Tensor3 zhat = to_transform_domain(model.z_modes, t);
        const Tensor3 that = to_transform_domain(model.t_upper, t);
        for (Eigen::Index k = 0; k < n; ++k)
            ahat.slice(k) = zhat.slice(k) * that.slice(k) * zhat.slice(k).adjoint();
    }
    return from_transform_domain(ahat, t, t.is_real_ring());
}

}  // namespace tubalg
