#include "tubalg/algebra.hpp"

namespace tubalg {

namespace {

bool numerically_real(const Tensor3& x) { return x.max_imag_abs() <= 1e-13 * std::max(1.0, x.max_abs()); }

}  // namespace

Tube tube_mul(const Tube& a, const Tube& b, const Transform& t) {
    if (a.length() != b.length() || a.length() != t.size())
        throw ShapeError("tube_mul: length mismatch");
    const Eigen::VectorXcd ahat = t.matrix() * a.values();
    const Eigen::VectorXcd bhat = t.matrix() * b.values();
    Eigen::VectorXcd chat = ahat.cwiseProduct(bhat);
    Eigen::VectorXcd c = t.inverse() * chat;
    const bool want_real = t.is_real_ring() && a.values().imag().norm() == 0.0 &&
                           b.values().imag().norm() == 0.0;
    if (want_real) {
        const double scale = std::max(c.norm(), 1e-300);
        if (c.imag().norm() > 1e-9 * scale)
            throw InternalConsistencyError("tube_mul: imaginary residue exceeds tolerance");
        c = c.real().cast<Complex>();
    }
    return Tube(std::move(c));
}

Tensor3 starm(const Tensor3& a, const Tensor3& b, const Transform& t) {
    if (a.cols() != b.rows() || a.tubes() != b.tubes() || a.tubes() != t.size())
        throw ShapeError("starm: shape mismatch");
    if (a.domain() != Domain::spatial || b.domain() != Domain::spatial)
        throw ShapeError("starm: operands must be spatial-domain tensors");
    const Tensor3 ahat = to_transform_domain(a, t);
    const Tensor3 bhat = to_transform_domain(b, t);
    const Tensor3 chat = facewise(ahat, bhat);
    const bool want_real = t.is_real_ring() && numerically_real(a) && numerically_real(b);
    return from_transform_domain(chat, t, want_real);
}

Tensor3 tube_scale(const Tube& b, const Tensor3& a, const Transform& t) {
    if (b.length() != t.size() || a.tubes() != t.size())
        throw ShapeError("tube_scale: length mismatch");
    const Eigen::VectorXcd bhat = t.matrix() * b.values();
    Tensor3 ahat = to_transform_domain(a, t);
    for (Eigen::Index k = 0; k < ahat.tubes(); ++k) ahat.slice(k) *= bhat(k);
    const bool want_real = t.is_real_ring() && numerically_real(a) &&
                           b.values().imag().norm() == 0.0;
    return from_transform_domain(ahat, t, want_real);
}

Tensor3 conj_transpose(const Tensor3& a, const Transform& t) {
    if (a.tubes() != t.size()) throw ShapeError("conj_transpose: tube length mismatch");
    const Tensor3 ahat = to_transform_domain(a, t);
    Tensor3 chat(a.cols(), a.rows(), a.tubes(), Domain::transform, t.id());
    for (Eigen::Index k = 0; k < a.tubes(); ++k) chat.slice(k) = ahat.slice(k).adjoint();
    return from_transform_domain(chat, t, t.is_real_ring() && numerically_real(a));
}

Tensor3 identity_tensor(Eigen::Index m, const Transform& t) {
    Tensor3 ihat(m, m, t.size(), Domain::transform, t.id());
    for (Eigen::Index k = 0; k < t.size(); ++k)
        ihat.slice(k) = Eigen::MatrixXcd::Identity(m, m);
    return from_transform_domain(ihat, t, t.is_real_ring());
}

bool is_unitary(const Tensor3& q, const Transform& t, double tol) {
    if (q.rows() != q.cols()) return false;
    const Tensor3 qhq = starm(conj_transpose(q, t), q, t);
    const Tensor3 eye = identity_tensor(q.rows(), t);
    return frob_norm(sub(qhq, eye)) <= tol;
}

Tube tube_weak_inverse(const Tube& s, const Transform& t, double tol) {
    if (s.length() != t.size()) throw ShapeError("tube_weak_inverse: length mismatch");
    Eigen::VectorXcd shat = t.matrix() * s.values();
    const double smax = shat.cwiseAbs().maxCoeff();
    Eigen::VectorXcd inv(shat.size());
    for (Eigen::Index k = 0; k < shat.size(); ++k)
        inv(k) = (std::abs(shat(k)) > tol * smax) ? 1.0 / shat(k) : Complex(0.0, 0.0);
    Eigen::VectorXcd v = t.inverse() * inv;
    if (t.is_real_ring() && s.values().imag().norm() == 0.0) v = v.real().cast<Complex>();
    return Tube(std::move(v));
}

Tensor3 t_product_circulant(const Tensor3& a, const Tensor3& b) {
    if (a.cols() != b.rows() || a.tubes() != b.tubes())
        throw ShapeError("t_product_circulant: shape mismatch");
    const Eigen::Index n = a.tubes();
    Tensor3 c(a.rows(), b.cols(), n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(a.rows(), b.cols());
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index shift = ((k - j) % n + n) % n;
            acc += a.slice(shift) * b.slice(j);
        }
        c.slice(k) = acc;
    }
    return c;
}

}  // namespace tubalg
