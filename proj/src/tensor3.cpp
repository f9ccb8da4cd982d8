#include "tubalg/tensor3.hpp"

#include <cstdlib>
#include <thread>

namespace tubalg {

int thread_budget() {
    static const int budget = [] {
        if (const char* env = std::getenv("TUBALG_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v >= 1) return static_cast<int>(v);
        }
        return 1;
    }();
    return budget;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const int workers = thread_budget();
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    std::vector<std::thread> pool;
    pool.reserve(nw);
    const std::size_t chunk = (count + nw - 1) / nw;
    for (std::size_t w = 0; w < nw; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

double Tensor3::max_abs() const {
    double m = 0.0;
    for (const Complex& z : v_) m = std::max(m, std::abs(z));
    return m;
}

double Tensor3::max_imag_abs() const {
    double m = 0.0;
    for (const Complex& z : v_) m = std::max(m, std::abs(z.imag()));
    return m;
}

Tensor3 Tensor3::real_part(double rel_tol) const {
    double im2 = 0.0, all2 = 0.0;
    for (const Complex& z : v_) {
        im2 += z.imag() * z.imag();
        all2 += std::norm(z);
    }
    if (im2 > rel_tol * rel_tol * std::max(all2, 1e-300))
        throw InternalConsistencyError(
            "real_part: imaginary residue exceeds tolerance on a provably-real result");
    std::vector<Complex> out(v_.size());
    for (std::size_t t = 0; t < v_.size(); ++t) out[t] = Complex(v_[t].real(), 0.0);
    return Tensor3(m_, p_, n_, std::move(out), Domain::spatial);
}

Eigen::MatrixXcd unfold(const Tensor3& t, int mode) {
    const Eigen::Index m = t.rows(), p = t.cols(), n = t.tubes();
    switch (mode) {
        case 1: {
            Eigen::MatrixXcd u(m, p * n);
            for (Eigen::Index k = 0; k < n; ++k)
                for (Eigen::Index j = 0; j < p; ++j)
                    for (Eigen::Index i = 0; i < m; ++i) u(i, j + k * p) = t.at(i, j, k);
            return u;
        }
        case 2: {
            Eigen::MatrixXcd u(p, m * n);
            for (Eigen::Index k = 0; k < n; ++k)
                for (Eigen::Index j = 0; j < p; ++j)
                    for (Eigen::Index i = 0; i < m; ++i) u(j, i + k * m) = t.at(i, j, k);
            return u;
        }
        case 3: {
            Eigen::MatrixXcd u(n, m * p);
            for (Eigen::Index k = 0; k < n; ++k)
                for (Eigen::Index j = 0; j < p; ++j)
                    for (Eigen::Index i = 0; i < m; ++i) u(k, i + j * m) = t.at(i, j, k);
            return u;
        }
        default:
            throw ShapeError("unfold: mode must be 1, 2 or 3");
    }
}

Tensor3 fold(const Eigen::MatrixXcd& mat, int mode, Eigen::Index m, Eigen::Index p,
             Eigen::Index n, Domain domain, std::string transform_id) {
    Tensor3 t(m, p, n, domain, std::move(transform_id));
    switch (mode) {
        case 1:
            if (mat.rows() != m || mat.cols() != p * n)
                throw ShapeError("fold: matrix shape does not match mode-1 dims");
            for (Eigen::Index k = 0; k < n; ++k)
                for (Eigen::Index j = 0; j < p; ++j)
                    for (Eigen::Index i = 0; i < m; ++i) t.at(i, j, k) = mat(i, j + k * p);
            break;
        case 2:
            if (mat.rows() != p || mat.cols() != m * n)
                throw ShapeError("fold: matrix shape does not match mode-2 dims");
            for (Eigen::Index k = 0; k < n; ++k)
                for (Eigen::Index j = 0; j < p; ++j)
                    for (Eigen::Index i = 0; i < m; ++i) t.at(i, j, k) = mat(j, i + k * m);
            break;
        case 3:
            if (mat.rows() != n || mat.cols() != m * p)
                throw ShapeError("fold: matrix shape does not match mode-3 dims");
            for (Eigen::Index k = 0; k < n; ++k)
                for (Eigen::Index j = 0; j < p; ++j)
                    for (Eigen::Index i = 0; i < m; ++i) t.at(i, j, k) = mat(k, i + j * m);
            break;
        default:
            throw ShapeError("fold: mode must be 1, 2 or 3");
    }
    return t;
}

Tensor3 ttm(const Tensor3& t, const Eigen::MatrixXcd& mat, int mode) {
    const Eigen::Index m = t.rows(), p = t.cols(), n = t.tubes();
    const Eigen::Index dk = (mode == 1) ? m : (mode == 2) ? p : n;
    if (mode < 1 || mode > 3) throw ShapeError("ttm: mode must be 1, 2 or 3");
    if (mat.cols() != dk) throw ShapeError("ttm: matrix column count does not match mode dim");
    const Eigen::Index q = mat.rows();
    const Eigen::MatrixXcd prod = mat * unfold(t, mode);
    switch (mode) {
        case 1: return fold(prod, 1, q, p, n, t.domain(), t.transform_id());
        case 2: return fold(prod, 2, m, q, n, t.domain(), t.transform_id());
        default: return fold(prod, 3, m, p, q, t.domain(), t.transform_id());
    }
}

Tensor3 facewise(const Tensor3& a, const Tensor3& b) {
    if (a.cols() != b.rows() || a.tubes() != b.tubes())
        throw ShapeError("facewise: inner dims or tube counts disagree");
    if (a.domain() != b.domain() ||
        (a.domain() == Domain::transform && a.transform_id() != b.transform_id()))
        throw ShapeError("facewise: operands live in different domains");
    Tensor3 c(a.rows(), b.cols(), a.tubes(), a.domain(), a.transform_id());
    parallel_for(static_cast<std::size_t>(a.tubes()), [&](std::size_t k) {
        c.slice(static_cast<Eigen::Index>(k)) =
            a.slice(static_cast<Eigen::Index>(k)) * b.slice(static_cast<Eigen::Index>(k));
    });
    return c;
}

Complex frob_inner(const Tensor3& a, const Tensor3& b) {
    if (!a.same_dims(b)) throw ShapeError("frob_inner: dims disagree");
    Complex s(0.0, 0.0);
    const Complex* pa = a.data();
    const Complex* pb = b.data();
    for (Eigen::Index t = 0; t < a.size(); ++t) s += pa[t] * std::conj(pb[t]);
    return s;
}

double frob_norm_sq(const Tensor3& a) {
    double s = 0.0;
    const Complex* pa = a.data();
    for (Eigen::Index t = 0; t < a.size(); ++t) s += std::norm(pa[t]);
    return s;
}

double frob_norm(const Tensor3& a) { return std::sqrt(frob_norm_sq(a)); }

Tensor3 add(const Tensor3& a, const Tensor3& b) {
    if (!a.same_dims(b)) throw ShapeError("add: dims disagree");
    Tensor3 c = a;
    Complex* pc = c.data();
    const Complex* pb = b.data();
    for (Eigen::Index t = 0; t < a.size(); ++t) pc[t] += pb[t];
    return c;
}

Tensor3 sub(const Tensor3& a, const Tensor3& b) {
    if (!a.same_dims(b)) throw ShapeError("sub: dims disagree");
    Tensor3 c = a;
    Complex* pc = c.data();
    const Complex* pb = b.data();
    for (Eigen::Index t = 0; t < a.size(); ++t) pc[t] -= pb[t];
    return c;
}

Tensor3 scale(const Tensor3& a, Complex factor) {
    Tensor3 c = a;
    Complex* pc = c.data();
    for (Eigen::Index t = 0; t < a.size(); ++t) pc[t] *= factor;
    return c;
}

}  // namespace tubalg
