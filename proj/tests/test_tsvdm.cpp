#include <doctest.h>

#include <Eigen/SVD>

#include "oracles.hpp"
#include "tubalg/optimality.hpp"
#include "tubalg/tsvdm.hpp"

using namespace tubalg;

namespace {

Transform pair2() {
    Eigen::MatrixXcd m(2, 2);
    m << Complex(1, 2), Complex(3, -1), Complex(1, -2), Complex(3, 1);
    return Transform::build(std::move(m), 1e-10, "pair2");
}

Tensor3 reconstruct(const TsvdmFactors& f, const Transform& t) {
    return starm(starm(f.u, f.s, t), conj_transpose(f.v, t), t);
}

}  // namespace

TEST_SUITE("tsvdm") {

TEST_CASE("n=1 reduces to the matrix SVD") {
    Rng rng(61);
    const Transform one = identity_transform(1);
    const Tensor3 x = oracles::random_real_tensor(4, 3, 1, rng);
    const TsvdmFactors f = tsvdm(x, one);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x.slice(0).real());
    for (Eigen::Index j = 0; j < 3; ++j)
        CHECK(f.s_hat(j, 0) == doctest::Approx(svd.singularValues()(j)).epsilon(1e-12));
    CHECK(oracles::rel_diff(reconstruct(f, one), x) < 1e-12);
}

TEST_CASE("identity tensor factorizes with unit singular values") {
    const Transform t = dft_transform(4);
    const Tensor3 eye = identity_tensor(3, t);
    const TsvdmFactors f = tsvdm(eye, t);
    for (Eigen::Index k = 0; k < 4; ++k)
        for (Eigen::Index j = 0; j < 3; ++j)
            CHECK(f.s_hat(j, k) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(oracles::rel_diff(reconstruct(f, t), eye) < 1e-11);
}

TEST_CASE("factor invariants on a random tensor under the dft") {
    Rng rng(62);
    const Transform t = dft_transform(4);
    const Tensor3 x = oracles::random_real_tensor(4, 3, 4, rng);
    const TsvdmFactors f = tsvdm(x, t);

    CHECK(oracles::rel_diff(reconstruct(f, t), x) < 1e-11);
    CHECK(is_unitary(f.u, t, 1e-9));
    CHECK(is_unitary(f.v, t, 1e-9));
    // spatial factors are real
    CHECK(f.u.max_imag_abs() == 0.0);
    CHECK(f.s.max_imag_abs() == 0.0);
    CHECK(f.v.max_imag_abs() == 0.0);
    // descending nonnegative per slice, exactly group-constant
    for (Eigen::Index k = 0; k < 4; ++k)
        for (Eigen::Index j = 0; j + 1 < 3; ++j) {
            CHECK(f.s_hat(j, k) >= f.s_hat(j + 1, k));
            CHECK(f.s_hat(j + 1, k) >= 0.0);
        }
    const auto& st = t.structure();
    for (Eigen::Index j = 0; j < st.ell; ++j)
        for (std::size_t a = 1; a < st.groups[static_cast<std::size_t>(j)].size(); ++a)
            for (Eigen::Index row = 0; row < 3; ++row)
                CHECK(f.s_hat(row, st.groups[static_cast<std::size_t>(j)][a]) ==
                      f.s_hat(row, st.groups[static_cast<std::size_t>(j)][0]));
    // s is f-diagonal in both domains
    for (Eigen::Index k = 0; k < 4; ++k)
        for (Eigen::Index j = 0; j < 3; ++j)
            for (Eigen::Index i = 0; i < 4; ++i)
                if (i != j) CHECK(std::abs(f.s.at(i, j, k)) < 1e-11);
    CHECK(f.s.at(0, 0, 0) != Complex(0.0, 0.0));

    CHECK_THROWS_AS(tsvdm(to_transform_domain(x, t), t), ShapeError);
}

TEST_CASE("reconstruction across transform families and sizes") {
    Rng rng(63);
    for (const Transform& t :
         {identity_transform(5), dft_transform(5), dct_transform(5),
          random_valid_transform(5, 31), scaled_transform(random_valid_transform(5, 32),
                                                          std::vector<double>(
                                                              random_valid_transform(5, 32)
                                                                  .structure()
                                                                  .ell,
                                                              2.5))}) {
        const Tensor3 x = oracles::random_real_tensor(6, 4, 5, rng);
        const TsvdmFactors f = tsvdm(x, t);
        CHECK(oracles::rel_diff(reconstruct(f, t), x) < 1e-10);
    }
}

TEST_CASE("t_rank basics") {
    const Transform t = dft_transform(3);
    const Tensor3 zero(3, 3, 3);
    CHECK(t_rank(tsvdm(zero, t)) == 0);
    CHECK(t_rank(tsvdm(identity_tensor(3, t), t)) == 3);

    // an outer product of lateral slices has t-rank 1
    Rng rng(64);
    Tensor3 u(3, 1, 3), v(3, 1, 3);
    for (Eigen::Index k = 0; k < 3; ++k)
        for (Eigen::Index i = 0; i < 3; ++i) {
            u.at(i, 0, k) = rng.gaussian();
            v.at(i, 0, k) = rng.gaussian();
        }
    const Tensor3 rank1 = starm(u, conj_transpose(v, t), t);
    CHECK(t_rank(tsvdm(rank1, t)) == 1);
}

TEST_CASE("multirank and the conjugate-pair obstruction") {
    const Transform t = pair2();
    Eigen::VectorXd v(2);
    v << 0.3, -1.2;
    const Tensor3 a = Tube::from_real(v).as_tensor();
    const TsvdmFactors f = tsvdm(a, t);
    const auto r = multirank(f);
    CHECK(r == std::vector<Eigen::Index>{1, 1});
    CHECK(implicit_rank(f) == 2);
    CHECK(tubal_length(f, t) == std::vector<Eigen::Index>{1});

    const Tensor3 zero(1, 1, 2);
    CHECK(multirank(tsvdm(zero, t)) == std::vector<Eigen::Index>{0, 0});

    // generic full tensors hit full multirank
    Rng rng(65);
    const Transform dft = dft_transform(4);
    const Tensor3 x = oracles::random_real_tensor(3, 3, 4, rng);
    CHECK(multirank(tsvdm(x, dft)) == std::vector<Eigen::Index>(4, 3));
}

TEST_CASE("tubal length vs multirank through tau") {
    Rng rng(66);
    const Transform t = dft_transform(4);
    const Tensor3 x = oracles::random_real_tensor(3, 3, 4, rng);
    const TsvdmFactors f = tsvdm(x, t);
    const auto r = multirank(f);
    const auto lam = tubal_length(f, t);
    for (Eigen::Index k = 0; k < 4; ++k)
        CHECK(lam[static_cast<std::size_t>(t.structure().tau[k])] ==
              r[static_cast<std::size_t>(k)]);
}

TEST_CASE("length <-> multirank correspondence") {
    const Transform t = pair2();
    const auto& st = t.structure();
    CHECK(length_to_multirank({1}, st) == std::vector<Eigen::Index>{1, 1});
    CHECK(multirank_to_length({1, 1}, st) == std::vector<Eigen::Index>{1});
    CHECK(length_to_multirank({0}, st) == std::vector<Eigen::Index>{0, 0});
    CHECK_THROWS_AS(multirank_to_length({1, 0}, st), InvalidMultirankError);

    const Transform dft = dft_transform(4);
    // detected groups: {0}, {1,3}, {2}
    CHECK(length_to_multirank({2, 1, 0}, dft.structure()) ==
          std::vector<Eigen::Index>{2, 1, 0, 1});
    CHECK(multirank_to_length({2, 1, 0, 1}, dft.structure()) ==
          std::vector<Eigen::Index>{2, 1, 0});

    // round trips and order preservation on random pairs
    Rng rng(67);
    const Transform rv = random_valid_transform(6, 41);
    const auto& rst = rv.structure();
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<Eigen::Index> lam(static_cast<std::size_t>(rst.ell));
        std::vector<Eigen::Index> lam2(static_cast<std::size_t>(rst.ell));
        for (std::size_t j = 0; j < lam.size(); ++j) {
            lam[j] = rng.uniform_int(0, 4);
            lam2[j] = rng.uniform_int(0, 4);
        }
        const auto r = length_to_multirank(lam, rst);
        CHECK(multirank_to_length(r, rst) == lam);
        const auto r2 = length_to_multirank(lam2, rst);
        bool lam_le = true, r_le = true;
        for (std::size_t j = 0; j < lam.size(); ++j) lam_le &= lam[j] <= lam2[j];
        for (std::size_t k = 0; k < r.size(); ++k) r_le &= r[k] <= r2[k];
        CHECK(lam_le == r_le);
    }
}

TEST_CASE("truncation base cases") {
    Rng rng(68);
    const Transform t = dct_transform(4);
    const Tensor3 x = oracles::random_real_tensor(4, 4, 4, rng);
    const TsvdmFactors f = tsvdm(x, t);

    CHECK(oracles::rel_diff(truncate(f, t, TRank{4}), x) < 1e-10);
    CHECK(frob_norm(truncate(f, t, TRank{0})) == 0.0);
    CHECK_THROWS_AS(truncate(f, t, TRank{5}), ShapeError);
    CHECK_THROWS_AS(truncate(f, t, MultiRank{{1, 1, 1}}), ShapeError);
}

TEST_CASE("truncation error matches the closed form under the dct") {
    Rng rng(69);
    const Transform t = dct_transform(4);
    const Tensor3 x = oracles::random_real_tensor(4, 4, 4, rng);
    const TsvdmFactors f = tsvdm(x, t);
    const MultiRank spec{{2, 2, 2, 2}};
    const Tensor3 xr = truncate(f, t, spec);
    double tail = 0.0;
    for (Eigen::Index k = 0; k < 4; ++k)
        for (Eigen::Index j = 2; j < 4; ++j) tail += f.s_hat(j, k) * f.s_hat(j, k);
    const double direct = frob_norm_sq(sub(x, xr));
    CHECK(std::abs(direct - tail) <= 1e-9 * std::max(1.0, tail));
    CHECK(std::abs(truncation_error(f, t, spec) - direct) <= 1e-9 * std::max(1.0, direct));
}

TEST_CASE("truncation error: full rank gives zero; scaled transforms weight the tails") {
    Rng rng(70);
    const Transform q = random_valid_transform(4, 51);
    std::vector<double> w(static_cast<std::size_t>(q.structure().ell));
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = 1.0 + static_cast<double>(j);
    const Transform dq = scaled_transform(q, w);

    const Tensor3 x = oracles::random_real_tensor(5, 4, 4, rng);
    for (const Transform* t : {&q, &dq}) {
        const TsvdmFactors f = tsvdm(x, *t);
        CHECK(truncation_error(f, *t, TRank{4}) <= 1e-18);
        for (Eigen::Index r = 0; r <= 3; ++r) {
            const double direct = frob_norm_sq(sub(x, truncate(f, *t, TRank{r})));
            const double formula = truncation_error(f, *t, TRank{r});
            CHECK(std::abs(direct - formula) <= 1e-9 * std::max(1.0, direct));
        }
    }

    // invalid transforms have no closed form
    Eigen::MatrixXcd bad(2, 2);
    bad << 1, 1, 0, 1;
    const Transform shear = Transform::build(std::move(bad), 1e-10, "shear");
    const Tensor3 y = oracles::random_real_tensor(3, 3, 2, rng);
    CHECK_THROWS_AS(truncation_error(tsvdm(y, shear), shear, TRank{1}), NotApplicableError);
}

TEST_CASE("tubal-length truncation equals the corresponding multirank truncation") {
    Rng rng(71);
    const Transform t = random_valid_transform(6, 53);
    const Tensor3 x = oracles::random_real_tensor(4, 4, 6, rng);
    const TsvdmFactors f = tsvdm(x, t);
    std::vector<Eigen::Index> lam(static_cast<std::size_t>(t.structure().ell));
    for (std::size_t j = 0; j < lam.size(); ++j) j % 2 ? lam[j] = 1 : lam[j] = 2;
    const Tensor3 via_len = truncate(f, t, TubalLength{lam});
    const Tensor3 via_mr = truncate(f, t, MultiRank{length_to_multirank(lam, t.structure())});
    CHECK(frob_norm(sub(via_len, via_mr)) == 0.0);
}

TEST_CASE("tsvdm2: gamma = 1 reproduces the tensor at full multirank") {
    Rng rng(72);
    const Transform t = dct_transform(4);
    const Tensor3 x = oracles::random_real_tensor(3, 3, 4, rng);
    const Tsvdm2Result res = tsvdm2(x, t, 1.0);
    CHECK(oracles::rel_diff(res.approx, x) < 1e-11);
    CHECK(res.rho == std::vector<Eigen::Index>(4, 3));
    CHECK(res.retained_energy == doctest::Approx(1.0));
    CHECK_THROWS(tsvdm2(x, t, 0.0));
    CHECK_THROWS(tsvdm2(x, t, 1.5));
}

TEST_CASE("tsvdm2: dominant component at gamma = 0.9 (frozen spectrum)") {
    // transform dft(2); hat slices diag(10, 0.1) and diag(0.5, 0.2).
    // nu = (100, .25, .04, .01), omega_1 = 100/100.3 >= 0.9,
    // so r_gamma = 1, cutoff = 100, rho = (1, 0).
    const Transform t = dft_transform(2);
    Tensor3 hat(2, 2, 2, Domain::transform, t.id());
    hat.at(0, 0, 0) = 10.0;
    hat.at(1, 1, 0) = 0.1;
    hat.at(0, 0, 1) = 0.5;
    hat.at(1, 1, 1) = 0.2;
    const Tensor3 x = from_transform_domain(hat, t, true);
    const Tsvdm2Result res = tsvdm2(x, t, 0.9);
    CHECK(res.r_gamma == 1);
    CHECK(res.rho == std::vector<Eigen::Index>{1, 0});
    CHECK(res.retained_energy == doctest::Approx(100.0 / 100.3).epsilon(1e-12));
}

TEST_CASE("tsvdm2 properties on random data") {
    Rng rng(73);
    const Transform t = dct_transform(8);
    const Tensor3 x = oracles::random_real_tensor(8, 8, 8, rng);
    for (double gamma : {0.5, 0.8, 0.95}) {
        const Tsvdm2Result res = tsvdm2(x, t, gamma);
        CHECK(res.retained_energy >= gamma);
        // rho is group-constant (all groups are singletons here, so just valid)
        CHECK_NOTHROW(multirank_to_length(res.rho, t.structure()));
        Eigen::Index implicit = 0;
        for (auto v : res.rho) implicit += v;
        CHECK(implicit >= res.r_gamma);
        // kept energy accounts for at least gamma of the transform energy
        const TsvdmFactors f = tsvdm(x, t);
        double total = 0.0, tail = 0.0;
        for (Eigen::Index k = 0; k < 8; ++k)
            for (Eigen::Index j = 0; j < 8; ++j) {
                total += f.s_hat(j, k) * f.s_hat(j, k);
                if (j >= res.rho[static_cast<std::size_t>(k)])
                    tail += f.s_hat(j, k) * f.s_hat(j, k);
            }
        CHECK(tail <= (1.0 - gamma) * total + 1e-12 * total);
    }

    // group-constancy with conjugate pairs present
    const Transform dft = dft_transform(6);
    const Tensor3 y = oracles::random_real_tensor(5, 5, 6, rng);
    const Tsvdm2Result res = tsvdm2(y, dft, 0.8);
    CHECK_NOTHROW(multirank_to_length(res.rho, dft.structure()));
}

TEST_CASE("truncation optimality spot check against random competitors") {
    Rng rng(74);
    const Transform t = dct_transform(4);
    const Tensor3 x = oracles::random_real_tensor(4, 4, 4, rng);
    std::vector<Eigen::Index> lam(4, 2);
    const auto witness = refute_random(x, t, lam, 1000, 99);
    CHECK_FALSE(witness.has_value());
}

TEST_CASE("truncated factors for storage accounting") {
    Rng rng(75);
    const Transform t = dft_transform(4);
    const Tensor3 x = oracles::random_real_tensor(5, 4, 4, rng);
    const TsvdmFactors f = tsvdm(x, t);
    const TruncatedFactors tf = truncate_factors(f, t, TRank{2});
    CHECK(tf.r_tilde == 2);
    CHECK(tf.u.rows() == 5);
    CHECK(tf.u.cols() == 2);
    CHECK(tf.s.rows() == 2);
    CHECK(tf.v.rows() == 4);
    // compact product equals the truncation
    const Tensor3 compact =
        starm(starm(tf.u, tf.s, t), conj_transpose(tf.v, t), t);
    CHECK(oracles::rel_diff(compact, truncate(f, t, TRank{2})) < 1e-11);
}

}  // TEST_SUITE
