#include "tubalg/tsvdm.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <numeric>

namespace tubalg {

namespace {

struct HatFactors {
    Tensor3 u, s, v;  // transform-domain
};

// Facewise SVD with one decomposition per group: the representative slice is
// factored and the partner slice receives the conjugated factors. Slices of
// degree-1 groups are real, so a real SVD keeps their factors real.
HatFactors facewise_svd(const Tensor3& xhat, const Transform& t, Eigen::MatrixXd& s_hat) {
    const Eigen::Index m = xhat.rows(), p = xhat.cols(), n = xhat.tubes();
    const Eigen::Index q = std::min(m, p);
    HatFactors hf{Tensor3(m, m, n, Domain::transform, t.id()),
                  Tensor3(m, p, n, Domain::transform, t.id()),
                  Tensor3(p, p, n, Domain::transform, t.id())};
    s_hat.setZero(q, n);

    const IdempotentStructure& st = t.structure();
    parallel_for(static_cast<std::size_t>(st.ell), [&](std::size_t gj) {
        const auto& group = st.groups[gj];
        const Eigen::Index k0 = group[0];
        Eigen::MatrixXcd uu, vv;
        Eigen::VectorXd sig;
        if (group.size() == 1) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(xhat.slice(k0).real(),
                                                  Eigen::ComputeFullU | Eigen::ComputeFullV);
            uu = svd.matrixU().cast<Complex>();
            vv = svd.matrixV().cast<Complex>();
            sig = svd.singularValues();
        } else {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(xhat.slice(k0),
                                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
            uu = svd.matrixU();
            vv = svd.matrixV();
            sig = svd.singularValues();
        }
        Eigen::MatrixXcd ss = Eigen::MatrixXcd::Zero(m, p);
        for (Eigen::Index j = 0; j < q; ++j) ss(j, j) = sig(j);

        hf.u.slice(k0) = uu;
        hf.s.slice(k0) = ss;
        hf.v.slice(k0) = vv;
        s_hat.col(k0) = sig;
        if (group.size() == 2) {
            const Eigen::Index k1 = group[1];
            hf.u.slice(k1) = uu.conjugate();
            hf.s.slice(k1) = ss;
            hf.v.slice(k1) = vv.conjugate();
            s_hat.col(k1) = sig;
        }
    });
    return hf;
}

double s_hat_max(const TsvdmFactors& f) {
    return f.s_hat.size() == 0 ? 0.0 : f.s_hat.maxCoeff();
}

}  // namespace

TsvdmFactors tsvdm(const Tensor3& x, const Transform& t) {
    t.require_real_ring();
    if (x.domain() != Domain::spatial) throw ShapeError("tsvdm: input must be spatial");
    if (x.tubes() != t.size()) throw ShapeError("tsvdm: tube length does not match transform");
    if (x.max_imag_abs() > 1e-12 * std::max(1.0, x.max_abs()))
        throw ShapeError("tsvdm: input must be real");

    const Tensor3 xhat = to_transform_domain(x, t);
    TsvdmFactors f;
    f.transform_id = t.id();
    f.m = x.rows();
    f.p = x.cols();
    f.n = x.tubes();
    const HatFactors hf = facewise_svd(xhat, t, f.s_hat);
    f.u = from_transform_domain(hf.u, t, true);
    f.s = from_transform_domain(hf.s, t, true);
    f.v = from_transform_domain(hf.v, t, true);
    return f;
}

Eigen::Index t_rank(const TsvdmFactors& f, double tol) {
    const double smax = s_hat_max(f);
    if (smax <= 0.0) return 0;
    Eigen::Index r = 0;
    for (Eigen::Index j = 0; j < f.s_hat.rows(); ++j)
        if (f.s_hat.row(j).maxCoeff() > tol * smax) ++r;
    return r;
}

std::vector<Eigen::Index> multirank(const TsvdmFactors& f, double tol) {
    std::vector<Eigen::Index> r(static_cast<std::size_t>(f.n), 0);
    const double smax = s_hat_max(f);
    if (smax <= 0.0) return r;
    for (Eigen::Index k = 0; k < f.n; ++k) {
        Eigen::Index c = 0;
        for (Eigen::Index j = 0; j < f.s_hat.rows(); ++j)
            if (f.s_hat(j, k) > tol * smax) ++c;
        r[static_cast<std::size_t>(k)] = c;
    }
    return r;
}

Eigen::Index implicit_rank(const TsvdmFactors& f, double tol) {
    const auto r = multirank(f, tol);
    return std::accumulate(r.begin(), r.end(), Eigen::Index{0});
}

std::vector<Eigen::Index> tubal_length(const TsvdmFactors& f, const Transform& t, double tol) {
    const auto r = multirank(f, tol);
    const IdempotentStructure& st = t.structure();
    std::vector<Eigen::Index> lambda(static_cast<std::size_t>(st.ell), 0);
    for (Eigen::Index j = 0; j < st.ell; ++j)
        lambda[static_cast<std::size_t>(j)] =
            r[static_cast<std::size_t>(st.groups[static_cast<std::size_t>(j)][0])];
    return lambda;
}

std::vector<Eigen::Index> length_to_multirank(const std::vector<Eigen::Index>& lambda,
                                              const IdempotentStructure& st) {
    if (static_cast<Eigen::Index>(lambda.size()) != st.ell)
        throw ShapeError("length_to_multirank: expected one entry per idempotent group");
    std::vector<Eigen::Index> r(st.tau.size(), 0);
    for (std::size_t k = 0; k < st.tau.size(); ++k)
        r[k] = lambda[static_cast<std::size_t>(st.tau[k])];
    return r;
}

std::vector<Eigen::Index> multirank_to_length(const std::vector<Eigen::Index>& r,
                                              const IdempotentStructure& st) {
    if (r.size() != st.tau.size())
        throw ShapeError("multirank_to_length: expected one entry per slice");
    std::vector<Eigen::Index> lambda(static_cast<std::size_t>(st.ell), 0);
    for (Eigen::Index j = 0; j < st.ell; ++j) {
        const auto& g = st.groups[static_cast<std::size_t>(j)];
        const Eigen::Index r0 = r[static_cast<std::size_t>(g[0])];
        for (Eigen::Index k : g)
            if (r[static_cast<std::size_t>(k)] != r0)
                throw InvalidMultirankError(
                    "multirank must be constant across slices of the same conjugate-pair "
                    "group (no real tensor attains it otherwise)");
        lambda[static_cast<std::size_t>(j)] = r0;
    }
    return lambda;
}

std::vector<Eigen::Index> resolve_rank_spec(const RankSpec& spec, const Transform& t,
                                            Eigen::Index m, Eigen::Index p) {
    const Eigen::Index q = std::min(m, p);
    const IdempotentStructure& st = t.structure();
    std::vector<Eigen::Index> rk;
    if (const auto* tr = std::get_if<TRank>(&spec)) {
        if (tr->r < 0 || tr->r > q) throw ShapeError("t-rank out of range [0, min(m,p)]");
        rk.assign(static_cast<std::size_t>(t.size()), tr->r);
    } else if (const auto* mr = std::get_if<MultiRank>(&spec)) {
        if (static_cast<Eigen::Index>(mr->r.size()) != t.size())
            throw ShapeError("multirank length must equal the tube length n");
        for (Eigen::Index v : mr->r)
            if (v < 0 || v > q) throw ShapeError("multirank entry out of range [0, min(m,p)]");
        multirank_to_length(mr->r, st);  // validity (group constancy) gate
        rk = mr->r;
    } else {
        const auto& lam = std::get<TubalLength>(spec).lambda;
        if (static_cast<Eigen::Index>(lam.size()) != st.ell)
            throw ShapeError("tubal-length must have one entry per idempotent group");
        for (Eigen::Index v : lam)
            if (v < 0 || v > q) throw ShapeError("tubal-length entry out of range [0, min(m,p)]");
        rk = length_to_multirank(lam, st);
    }
    return rk;
}

namespace {

Tensor3 truncated_hat(const TsvdmFactors& f, const Transform& t,
                      const std::vector<Eigen::Index>& rk) {
    const Tensor3 uhat = to_transform_domain(f.u, t);
    const Tensor3 shat = to_transform_domain(f.s, t);
    const Tensor3 vhat = to_transform_domain(f.v, t);
    Tensor3 out(f.m, f.p, f.n, Domain::transform, t.id());
    for (Eigen::Index k = 0; k < f.n; ++k) {
        const Eigen::Index r = rk[static_cast<std::size_t>(k)];
        if (r == 0) continue;
        out.slice(k) = uhat.slice(k).leftCols(r) * shat.slice(k).topLeftCorner(r, r) *
                       vhat.slice(k).leftCols(r).adjoint();
    }
    return out;
}

}  // namespace

Tensor3 truncate(const TsvdmFactors& f, const Transform& t, const RankSpec& spec) {
    const auto rk = resolve_rank_spec(spec, t, f.m, f.p);
    return from_transform_domain(truncated_hat(f, t, rk), t, true);
}

double truncation_error(const TsvdmFactors& f, const Transform& t, const RankSpec& spec) {
    if (!t.is_valid_dq())
        throw NotApplicableError(
            "truncation_error: closed-form error requires a transform with a valid "
            "Eckart-Young certificate");
    const auto rk = resolve_rank_spec(spec, t, f.m, f.p);
    const auto& mu = t.certificate()->mu;
    const IdempotentStructure& st = t.structure();
    double err = 0.0;
    for (Eigen::Index k = 0; k < f.n; ++k) {
        const double m_k = mu[static_cast<std::size_t>(st.tau[static_cast<std::size_t>(k)])];
        double tail = 0.0;
        for (Eigen::Index j = rk[static_cast<std::size_t>(k)]; j < f.s_hat.rows(); ++j)
            tail += f.s_hat(j, k) * f.s_hat(j, k);
        err += tail / (m_k * m_k);
    }
    return err;
}

Tsvdm2Result tsvdm2(const Tensor3& x, const Transform& t, double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0)
        throw std::invalid_argument("tsvdm2: gamma must lie in (0, 1]");
    const TsvdmFactors f = tsvdm(x, t);

    std::vector<double> nu;
    nu.reserve(static_cast<std::size_t>(f.s_hat.size()));
    for (Eigen::Index k = 0; k < f.n; ++k)
        for (Eigen::Index j = 0; j < f.s_hat.rows(); ++j)
            nu.push_back(f.s_hat(j, k) * f.s_hat(j, k));
    std::sort(nu.begin(), nu.end(), std::greater<double>());
    const double total = std::accumulate(nu.begin(), nu.end(), 0.0);

    Tsvdm2Result res;
    if (total <= 0.0) {  // zero tensor: nothing to keep
        res.approx = Tensor3(f.m, f.p, f.n);
        res.rho.assign(static_cast<std::size_t>(f.n), 0);
        res.r_gamma = 0;
        res.retained_energy = 1.0;
        return res;
    }

    double cum = 0.0;
    Eigen::Index r_gamma = static_cast<Eigen::Index>(nu.size());
    for (std::size_t r = 0; r < nu.size(); ++r) {
        cum += nu[r];
        if (cum / total >= gamma) {
            r_gamma = static_cast<Eigen::Index>(r + 1);
            res.retained_energy = cum / total;
            break;
        }
    }
    const double cutoff = nu[static_cast<std::size_t>(r_gamma - 1)];

    res.rho.assign(static_cast<std::size_t>(f.n), 0);
    for (Eigen::Index k = 0; k < f.n; ++k) {
        Eigen::Index rho = 0;
        for (Eigen::Index j = 0; j < f.s_hat.rows(); ++j)
            if (f.s_hat(j, k) * f.s_hat(j, k) >= cutoff) rho = j + 1;
        res.rho[static_cast<std::size_t>(k)] = rho;
    }
    res.r_gamma = r_gamma;
    res.approx = truncate(f, t, MultiRank{res.rho});
    return res;
}

Eigen::Index r_gamma_original_domain(const TsvdmFactors& f, const Transform& t, double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0)
        throw std::invalid_argument("r_gamma_original_domain: gamma must lie in (0, 1]");
    if (!t.is_valid_dq())
        throw NotApplicableError("r_gamma_original_domain: requires a valid certificate");
    const auto& mu = t.certificate()->mu;
    const IdempotentStructure& st = t.structure();

    struct Entry {
        double hat2;      // selection key: transform-domain energy
        double spatial2;  // accumulated value: original-domain energy
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(f.s_hat.size()));
    for (Eigen::Index k = 0; k < f.n; ++k) {
        const double m_k = mu[static_cast<std::size_t>(st.tau[static_cast<std::size_t>(k)])];
        for (Eigen::Index j = 0; j < f.s_hat.rows(); ++j) {
            const double h2 = f.s_hat(j, k) * f.s_hat(j, k);
            entries.push_back({h2, h2 / (m_k * m_k)});
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.hat2 > b.hat2; });
    double total = 0.0;
    for (const Entry& e : entries) total += e.spatial2;
    if (total <= 0.0) return 0;
    double cum = 0.0;
    for (std::size_t r = 0; r < entries.size(); ++r) {
        cum += entries[r].spatial2;
        if (cum >= gamma * total) return static_cast<Eigen::Index>(r + 1);
    }
    return static_cast<Eigen::Index>(entries.size());
}

TruncatedFactors truncate_factors(const TsvdmFactors& f, const Transform& t,
                                  const RankSpec& spec) {
    const auto rk = resolve_rank_spec(spec, t, f.m, f.p);
    const Eigen::Index r_tilde = rk.empty() ? 0 : *std::max_element(rk.begin(), rk.end());

    const Tensor3 uhat = to_transform_domain(f.u, t);
    const Tensor3 shat = to_transform_domain(f.s, t);
    const Tensor3 vhat = to_transform_domain(f.v, t);
    Tensor3 uh(f.m, r_tilde, f.n, Domain::transform, t.id());
    Tensor3 sh(r_tilde, r_tilde, f.n, Domain::transform, t.id());
    Tensor3 vh(f.p, r_tilde, f.n, Domain::transform, t.id());
    for (Eigen::Index k = 0; k < f.n; ++k) {
        if (r_tilde == 0) break;
        uh.slice(k) = uhat.slice(k).leftCols(r_tilde);
        vh.slice(k) = vhat.slice(k).leftCols(r_tilde);
        Eigen::MatrixXcd ss = shat.slice(k).topLeftCorner(r_tilde, r_tilde);
        for (Eigen::Index j = rk[static_cast<std::size_t>(k)]; j < r_tilde; ++j) ss(j, j) = 0.0;
        sh.slice(k) = ss;
    }
    TruncatedFactors tf;
    tf.u = from_transform_domain(uh, t, true);
    tf.s = from_transform_domain(sh, t, true);
    tf.v = from_transform_domain(vh, t, true);
    tf.rk = rk;
    tf.r_tilde = r_tilde;
    return tf;
}

}  // namespace tubalg
