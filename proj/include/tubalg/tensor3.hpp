#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "tubalg/common.hpp"

namespace tubalg {

enum class Domain { spatial, transform };

/// Dense order-3 tensor of complex doubles.
///
/// Storage is a single contiguous buffer with entry (i,j,k) at
/// i + j*m + k*m*p, i.e. column-major frontal slices laid out slice after
/// slice. Frontal slice k is therefore a contiguous column-major m x p block
/// and can be viewed through an Eigen::Map without copying.
///
/// Tensors built from real input carry an exact zero imaginary part.
/// Operations never mutate their inputs; share across threads freely.
class Tensor3 {
public:
    Tensor3() : m_(0), p_(0), n_(0), domain_(Domain::spatial) {}

    Tensor3(Eigen::Index m, Eigen::Index p, Eigen::Index n,
            Domain domain = Domain::spatial, std::string transform_id = {})
        : m_(m), p_(p), n_(n), domain_(domain), tid_(std::move(transform_id)) {
        check_dims(m, p, n);
        v_.assign(static_cast<std::size_t>(m * p * n), Complex(0.0, 0.0));
    }

    Tensor3(Eigen::Index m, Eigen::Index p, Eigen::Index n, std::vector<Complex> values,
            Domain domain = Domain::spatial, std::string transform_id = {})
        : m_(m), p_(p), n_(n), domain_(domain), tid_(std::move(transform_id)),
          v_(std::move(values)) {
        check_dims(m, p, n);
        if (static_cast<Eigen::Index>(v_.size()) != m * p * n)
            throw ShapeError("Tensor3: value count does not match dims");
    }

    static Tensor3 from_real(Eigen::Index m, Eigen::Index p, Eigen::Index n,
                             const std::vector<double>& values) {
        if (static_cast<Eigen::Index>(values.size()) != m * p * n)
            throw ShapeError("Tensor3::from_real: value count does not match dims");
        std::vector<Complex> v(values.size());
        for (std::size_t t = 0; t < values.size(); ++t) v[t] = Complex(values[t], 0.0);
        return Tensor3(m, p, n, std::move(v));
    }

    Eigen::Index rows() const { return m_; }
    Eigen::Index cols() const { return p_; }
    Eigen::Index tubes() const { return n_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(v_.size()); }

    Domain domain() const { return domain_; }
    const std::string& transform_id() const { return tid_; }

    const Complex& at(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
        return v_[static_cast<std::size_t>(i + j * m_ + k * m_ * p_)];
    }
    Complex& at(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
        return v_[static_cast<std::size_t>(i + j * m_ + k * m_ * p_)];
    }

    Eigen::Map<const Eigen::MatrixXcd> slice(Eigen::Index k) const {
        return {v_.data() + k * m_ * p_, m_, p_};
    }
    Eigen::Map<Eigen::MatrixXcd> slice(Eigen::Index k) {
        return {v_.data() + k * m_ * p_, m_, p_};
    }

    // Tube fiber (i,j,:) as an n-vector.
    Eigen::VectorXcd tube_fiber(Eigen::Index i, Eigen::Index j) const {
        Eigen::VectorXcd t(n_);
        for (Eigen::Index k = 0; k < n_; ++k) t[k] = at(i, j, k);
        return t;
    }

    const Complex* data() const { return v_.data(); }
    Complex* data() { return v_.data(); }

    bool same_dims(const Tensor3& o) const { return m_ == o.m_ && p_ == o.p_ && n_ == o.n_; }

    double max_abs() const;
    double max_imag_abs() const;
    bool is_real(double tol = 0.0) const { return max_imag_abs() <= tol * std::max(1.0, max_abs()); }

    // Copy with the imaginary parts dropped. Throws InternalConsistencyError
    // when the residue exceeds 1e-9 relative to the tensor magnitude.
    Tensor3 real_part(double rel_tol = 1e-9) const;

private:
    static void check_dims(Eigen::Index m, Eigen::Index p, Eigen::Index n) {
        if (m < 0 || p < 0 || n < 0) throw ShapeError("Tensor3: negative dimension");
    }

    Eigen::Index m_, p_, n_;
    Domain domain_;
    std::string tid_;
    std::vector<Complex> v_;
};

/// A 1x1xn fiber; the scalar-like element of the tubal ring.
class Tube {
public:
    Tube() = default;
    explicit Tube(Eigen::Index n, Domain domain = Domain::spatial, std::string transform_id = {})
        : v_(Eigen::VectorXcd::Zero(n)), domain_(domain), tid_(std::move(transform_id)) {
        if (n < 1) throw ShapeError("Tube: length must be >= 1");
    }
    explicit Tube(Eigen::VectorXcd values, Domain domain = Domain::spatial,
                  std::string transform_id = {})
        : v_(std::move(values)), domain_(domain), tid_(std::move(transform_id)) {
        if (v_.size() < 1) throw ShapeError("Tube: length must be >= 1");
    }
    static Tube from_real(const Eigen::VectorXd& values) {
        return Tube(values.cast<Complex>());
    }

    Eigen::Index length() const { return v_.size(); }
    const Eigen::VectorXcd& values() const { return v_; }
    Eigen::VectorXcd& values() { return v_; }
    Complex operator[](Eigen::Index k) const { return v_[k]; }

    Domain domain() const { return domain_; }
    const std::string& transform_id() const { return tid_; }

    Tensor3 as_tensor() const {
        std::vector<Complex> v(v_.data(), v_.data() + v_.size());
        return Tensor3(1, 1, v_.size(), std::move(v), domain_, tid_);
    }
    static Tube from_tensor(const Tensor3& t) {
        if (t.rows() != 1 || t.cols() != 1)
            throw ShapeError("Tube::from_tensor: tensor is not 1x1xn");
        Eigen::VectorXcd v(t.tubes());
        for (Eigen::Index k = 0; k < t.tubes(); ++k) v[k] = t.at(0, 0, k);
        return Tube(std::move(v), t.domain(), t.transform_id());
    }

private:
    Eigen::VectorXcd v_;
    Domain domain_ = Domain::spatial;
    std::string tid_;
};

// ---- mode-wise primitives ----

// Mode-k unfolding, d_k x (product of the other dims). Fiber order is pinned:
//   mode 1: column c = j + k*p   (fiber (:,j,k))
//   mode 2: column c = i + k*m   (fiber (i,:,k))
//   mode 3: column c = i + j*m   (fiber (i,j,:))
Eigen::MatrixXcd unfold(const Tensor3& t, int mode);

// Inverse of unfold under the same fiber ordering. dims = (m, p, n) of the result.
Tensor3 fold(const Eigen::MatrixXcd& mat, int mode, Eigen::Index m, Eigen::Index p,
             Eigen::Index n, Domain domain = Domain::spatial, std::string transform_id = {});

// Mode-k product: fold(mat * unfold(t, mode), mode, updated dims).
Tensor3 ttm(const Tensor3& t, const Eigen::MatrixXcd& mat, int mode);

// Frontal-slice-wise matrix product; both operands must share n and domain.
Tensor3 facewise(const Tensor3& a, const Tensor3& b);

Complex frob_inner(const Tensor3& a, const Tensor3& b);
double frob_norm(const Tensor3& a);
double frob_norm_sq(const Tensor3& a);

Tensor3 add(const Tensor3& a, const Tensor3& b);
Tensor3 sub(const Tensor3& a, const Tensor3& b);
Tensor3 scale(const Tensor3& a, Complex factor);

}  // namespace tubalg
