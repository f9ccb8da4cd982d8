#include "tubalg/transform.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>

namespace tubalg {

namespace {

constexpr double kConditionLimit = 1e12;

std::vector<RowPairing> detect_pairing(const Eigen::MatrixXcd& m, double tol, bool& real_ring) {
    const Eigen::Index n = m.rows();
    std::vector<RowPairing> pairing(static_cast<std::size_t>(n));
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    real_ring = true;
    for (Eigen::Index s = 0; s < n; ++s) {
        if (taken[static_cast<std::size_t>(s)]) continue;
        const double row_scale = std::max(m.row(s).norm(), 1e-300);
        if (m.row(s).imag().norm() <= tol * row_scale) {
            pairing[static_cast<std::size_t>(s)] = {true, s};
            taken[static_cast<std::size_t>(s)] = true;
            continue;
        }
        Eigen::Index best = -1;
        double best_err = tol;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (t == s || taken[static_cast<std::size_t>(t)]) continue;
            const double err = (m.row(t) - m.row(s).conjugate()).norm() / row_scale;
            if (err <= best_err) {
                best_err = err;
                best = t;
            }
        }
        if (best < 0) {
            // Not a real ring; leave the row unpaired (degree-1 group) so the
            // structure stays well-formed for complex-only use.
            pairing[static_cast<std::size_t>(s)] = {false, s};
            taken[static_cast<std::size_t>(s)] = true;
            real_ring = false;
            continue;
        }
        pairing[static_cast<std::size_t>(s)] = {false, best};
        pairing[static_cast<std::size_t>(best)] = {false, s};
        taken[static_cast<std::size_t>(s)] = true;
        taken[static_cast<std::size_t>(best)] = true;
    }
    return pairing;
}

IdempotentStructure derive_structure(const std::vector<RowPairing>& pairing) {
    const Eigen::Index n = static_cast<Eigen::Index>(pairing.size());
    IdempotentStructure st;
    st.tau.assign(static_cast<std::size_t>(n), -1);
    for (Eigen::Index s = 0; s < n; ++s) {
        if (st.tau[static_cast<std::size_t>(s)] >= 0) continue;
        const Eigen::Index j = st.ell++;
        std::vector<Eigen::Index> g{s};
        st.tau[static_cast<std::size_t>(s)] = j;
        const Eigen::Index partner = pairing[static_cast<std::size_t>(s)].partner;
        if (partner != s) {
            g.push_back(partner);
            st.tau[static_cast<std::size_t>(partner)] = j;
        }
        st.degrees.push_back(static_cast<int>(g.size()));
        st.groups.push_back(std::move(g));
    }
    return st;
}

}  // namespace

Transform Transform::build(Eigen::MatrixXcd m, double tol, std::string id) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw ShapeError("Transform::build: matrix must be square and nonempty");
    Transform t;
    t.n_ = m.rows();
    t.id_ = std::move(id);
    t.tol_ = tol;
    t.m_ = std::move(m);

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t.m_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(t.n_ - 1);
    if (!(smin > 0.0) || smax / smin > kConditionLimit)
        throw NotInvertibleError("Transform::build: condition estimate above 1e12 for '" +
                                 t.id_ + "'");
    // M^-1 = V * S^-1 * U^H from the SVD already at hand.
    t.minv_ = svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
              svd.matrixU().adjoint();

    t.pairing_ = detect_pairing(t.m_, tol, t.real_ring_);
    t.structure_ = derive_structure(t.pairing_);
    if (t.real_ring_) t.cert_ = check_eckart_young(t, tol);
    return t;
}

EckartYoungCertificate check_eckart_young(const Transform& t, double tol) {
    t.require_real_ring();
    const Eigen::MatrixXcd& m = t.matrix();
    const Eigen::Index n = t.size();
    const IdempotentStructure& st = t.structure();

    EckartYoungCertificate cert;
    Eigen::VectorXd row_norms(n);
    for (Eigen::Index s = 0; s < n; ++s) row_norms(s) = m.row(s).norm();

    for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index u = s + 1; u < n; ++u) {
            const Complex gram = (m.row(s) * m.row(u).adjoint())(0, 0);
            if (std::abs(gram) > tol * row_norms(s) * row_norms(u)) {
                const bool same_group =
                    st.tau[static_cast<std::size_t>(s)] == st.tau[static_cast<std::size_t>(u)];
                cert.valid = false;
                cert.violation = GramViolation{
                    same_group ? ViolationKind::in_group_non_orthogonal
                               : ViolationKind::cross_group,
                    s, u, gram};
                return cert;
            }
        }
    }
    for (Eigen::Index j = 0; j < st.ell; ++j) {
        const auto& g = st.groups[static_cast<std::size_t>(j)];
        if (g.size() == 2) {
            const double a = row_norms(g[0]), b = row_norms(g[1]);
            if (std::abs(a - b) > tol * std::max(a, b)) {
                cert.valid = false;
                cert.violation =
                    GramViolation{ViolationKind::unequal_norms, g[0], g[1], Complex(a - b, 0.0)};
                return cert;
            }
        }
    }
    cert.valid = true;
    cert.mu.resize(static_cast<std::size_t>(st.ell));
    for (Eigen::Index j = 0; j < st.ell; ++j) {
        const auto& g = st.groups[static_cast<std::size_t>(j)];
        double acc = 0.0;
        for (Eigen::Index s : g) acc += row_norms(s);
        cert.mu[static_cast<std::size_t>(j)] = acc / static_cast<double>(g.size());
    }
    return cert;
}

Tube Transform::idempotent_tube(Eigen::Index j) const {
    if (j < 0 || j >= structure_.ell)
        throw ShapeError("idempotent_tube: group index out of range");
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n_);
    for (Eigen::Index k : structure_.groups[static_cast<std::size_t>(j)]) e += minv_.col(k);
    return Tube(std::move(e));
}

Tube Transform::identity_tube() const {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n_);
    for (Eigen::Index k = 0; k < n_; ++k) e += minv_.col(k);
    return Tube(std::move(e));
}

Transform identity_transform(Eigen::Index n) {
    return Transform::build(Eigen::MatrixXcd::Identity(n, n), 1e-10,
                            "identity:" + std::to_string(n));
}

Transform dft_transform(Eigen::Index n) {
    Eigen::MatrixXcd f(n, n);
    const double w = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const double ang = w * static_cast<double>((j * k) % n);
            f(j, k) = Complex(std::cos(ang), std::sin(ang));
        }
    return Transform::build(std::move(f), 1e-10, "dft:" + std::to_string(n));
}

Transform dct_transform(Eigen::Index n) {
    Eigen::MatrixXcd c(n, n);
    const double pi = std::numbers::pi;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double amp = (j == 0) ? std::sqrt(1.0 / static_cast<double>(n))
                                    : std::sqrt(2.0 / static_cast<double>(n));
        for (Eigen::Index k = 0; k < n; ++k)
            c(j, k) = Complex(
                amp * std::cos(pi * static_cast<double>(j) * (2.0 * static_cast<double>(k) + 1.0) /
                               (2.0 * static_cast<double>(n))),
                0.0);
    }
    return Transform::build(std::move(c), 1e-10, "dct:" + std::to_string(n));
}

Transform random_valid_transform(Eigen::Index n, std::uint64_t seed) {
    Rng rng(seed ^ 0x7261'6e64'7472'6e73ull);
    // Random real orthogonal basis via Householder QR of a Gaussian matrix.
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) g(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    Eigen::MatrixXd q = qr.householderQ();
    for (Eigen::Index j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    const Eigen::MatrixXd basis = q.transpose();  // orthonormal rows

    const Eigen::Index max_pairs = n / 2;
    const Eigen::Index npairs =
        (max_pairs == 0) ? 0 : static_cast<Eigen::Index>(rng.uniform_int(std::min<Eigen::Index>(1, max_pairs), max_pairs));

    Eigen::MatrixXcd m(n, n);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Eigen::Index ell = npairs + (n - 2 * npairs);
    std::vector<double> mu(static_cast<std::size_t>(ell));
    for (auto& w : mu) w = std::exp(rng.uniform(-0.7, 0.7));

    Eigen::Index row = 0, grp = 0;
    for (Eigen::Index t = 0; t < npairs; ++t, ++grp) {
        const Eigen::VectorXcd qa = basis.row(2 * t).cast<Complex>();
        const Eigen::VectorXcd qb = basis.row(2 * t + 1).cast<Complex>();
        const Eigen::VectorXcd zrow = inv_sqrt2 * (qa + Complex(0.0, 1.0) * qb);
        m.row(row++) = mu[static_cast<std::size_t>(grp)] * zrow.transpose();
        m.row(row++) = mu[static_cast<std::size_t>(grp)] * zrow.conjugate().transpose();
    }
    for (Eigen::Index t = 2 * npairs; t < n; ++t, ++grp)
        m.row(row++) = mu[static_cast<std::size_t>(grp)] * basis.row(t).cast<Complex>();

    return Transform::build(std::move(m), 1e-10,
                            "random:" + std::to_string(n) + ":" + std::to_string(seed));
}

Transform scaled_transform(const Transform& t, const std::vector<double>& weights) {
    const IdempotentStructure& st = t.structure();
    if (static_cast<Eigen::Index>(weights.size()) != st.ell)
        throw ShapeError("scaled_transform: expected one weight per idempotent group");
    for (double w : weights)
        if (!(w > 0.0))
            throw std::invalid_argument("scaled_transform: weights must be strictly positive");
    Eigen::MatrixXcd m = t.matrix();
    for (Eigen::Index j = 0; j < st.ell; ++j)
        for (Eigen::Index s : st.groups[static_cast<std::size_t>(j)])
            m.row(s) *= weights[static_cast<std::size_t>(j)];
    return Transform::build(std::move(m), t.gram_diag_tolerance(), t.id() + ":scaled");
}

Tensor3 to_transform_domain(const Tensor3& x, const Transform& t) {
    if (x.tubes() != t.size())
        throw ShapeError("to_transform_domain: tube length does not match transform size");
    Tensor3 xhat = ttm(x, t.matrix(), 3);
    return Tensor3(xhat.rows(), xhat.cols(), xhat.tubes(),
                   std::vector<Complex>(xhat.data(), xhat.data() + xhat.size()),
                   Domain::transform, t.id());
}

Tensor3 from_transform_domain(const Tensor3& xhat, const Transform& t, bool enforce_real) {
    if (xhat.tubes() != t.size())
        throw ShapeError("from_transform_domain: tube length does not match transform size");
    Tensor3 x = ttm(xhat, t.inverse(), 3);
    Tensor3 out(x.rows(), x.cols(), x.tubes(),
                std::vector<Complex>(x.data(), x.data() + x.size()), Domain::spatial);
    if (enforce_real) return out.real_part();
    return out;
}

Tube to_transform_domain(const Tube& a, const Transform& t) {
    if (a.length() != t.size())
        throw ShapeError("to_transform_domain: tube length does not match transform size");
    return Tube(t.matrix() * a.values(), Domain::transform, t.id());
}

Tube from_transform_domain(const Tube& ahat, const Transform& t, bool enforce_real) {
    if (ahat.length() != t.size())
        throw ShapeError("from_transform_domain: tube length does not match transform size");
    Eigen::VectorXcd v = t.inverse() * ahat.values();
    if (enforce_real) {
        const double scale = std::max(v.norm(), 1e-300);
        if (v.imag().norm() > 1e-9 * scale)
            throw InternalConsistencyError(
                "from_transform_domain: imaginary residue exceeds tolerance");
        v = v.real().cast<Complex>();
    }
    return Tube(std::move(v), Domain::spatial);
}

}  // namespace tubalg
