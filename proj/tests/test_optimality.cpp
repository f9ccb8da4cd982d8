#include <doctest.h>

#include "oracles.hpp"
#include "tubalg/optimality.hpp"

using namespace tubalg;

TEST_SUITE("optimality") {

TEST_CASE("conj_pair_transform hits the requested gram-inverse block") {
    for (const Complex g : {Complex(0.2, 0.0), Complex(-0.31, 0.0), Complex(0.0, 0.3),
                            Complex(0.0, -0.17), Complex(0.12, -0.2)}) {
        const double big_s = 1.0;
        const Transform t = conj_pair_transform(big_s, g);
        CHECK(t.is_real_ring());
        CHECK(t.structure().degrees[0] == 2);
        const Eigen::MatrixXcd gi = (t.matrix() * t.matrix().adjoint()).inverse();
        CHECK(std::abs(gi(1, 0) - g) < 1e-12);
        CHECK(std::abs(gi(0, 0).real() + gi(1, 1).real() - big_s) < 1e-12);
    }
    CHECK_THROWS(conj_pair_transform(1.0, Complex(0.6, 0.0)));  // |g| >= S/2

    // g = 0 is the valid member of the family
    const Transform valid = conj_pair_transform(1.0, Complex(0.0, 0.0));
    REQUIRE(valid.certificate().has_value());
    CHECK(valid.certificate()->valid);
}

TEST_CASE("real-gram witness: frozen ratio (S+2g)/(S+g) at S=1, g=0.2") {
    const Transform t = conj_pair_transform(1.0, Complex(0.2, 0.0));
    REQUIRE_FALSE(t.certificate()->valid);
    const CounterexampleWitness w = counterexample_real_gram(t, 0);
    CHECK(w.gap > 1e-9);
    CHECK(w.x.max_imag_abs() == 0.0);
    CHECK(w.better.max_imag_abs() == 0.0);
    const double ratio = (w.err_trunc * w.err_trunc) / (w.err_better * w.err_better);
    CHECK(oracles::rel_err(ratio, 1.4 / 1.2) < 1e-8);

    // the competitor respects the length bound
    const auto lam = tubal_length(tsvdm(w.better, t), t);
    for (std::size_t j = 0; j < lam.size(); ++j) CHECK(lam[j] <= w.lambda[j]);
}

TEST_CASE("real-gram witness with negative real part swaps the better candidate") {
    const Transform t = conj_pair_transform(1.3, Complex(-0.25, 0.0));
    const CounterexampleWitness w = counterexample_real_gram(t, 0);
    CHECK(w.gap > 1e-9);
    const double re_g = w.gram.real();
    const double want = (w.big_s + 2 * re_g) / (w.big_s + re_g);  // < 1 here
    CHECK(want < 1.0);
    // err_trunc^2 = want * err_better^2 is the identity with A1/A2 swapped
    const double ratio = (w.err_trunc * w.err_trunc) / (w.err_better * w.err_better);
    CHECK(oracles::rel_err(ratio, 1.0 / want) < 1e-8);
}

TEST_CASE("real-gram witness not applicable when Re g = 0") {
    const Transform valid = conj_pair_transform(1.0, Complex(0.0, 0.0));
    CHECK_THROWS_AS(counterexample_real_gram(valid, 0), NotApplicableError);
    const Transform imag_only = conj_pair_transform(1.0, Complex(0.0, 0.25));
    CHECK_THROWS_AS(counterexample_real_gram(imag_only, 0), NotApplicableError);
    const Transform dct = dct_transform(4);
    CHECK_THROWS_AS(counterexample_real_gram(dct, 0), NotApplicableError);  // degree 1
}

TEST_CASE("imag-gram witness: frozen scale a = sqrt(1.6/0.7) at S=1, g=0.3i") {
    const Transform t = conj_pair_transform(1.0, Complex(0.0, 0.3));
    const CounterexampleWitness w = counterexample_imag_gram(t, 0);
    CHECK(w.gap > 1e-9);
    CHECK(w.a_scale == doctest::Approx(std::sqrt(1.6 / 0.7)).epsilon(1e-10));
    CHECK(w.x.max_imag_abs() == 0.0);
    // ||A - A2||^2 = a^2 (S-2 Im g)/(S+2 Im g) ||A - a A1||^2 with trunc = a A1
    const double a2 = w.a_scale * w.a_scale;
    const double want =
        a2 * (w.big_s - 2 * w.gram.imag()) / (w.big_s + 2 * w.gram.imag());
    const double ratio = (w.err_better * w.err_better) / (w.err_trunc * w.err_trunc);
    CHECK(oracles::rel_err(ratio, want) < 1e-8);
}

TEST_CASE("imag-gram witness with negative imaginary part") {
    const Transform t = conj_pair_transform(1.1, Complex(0.0, -0.2));
    const CounterexampleWitness w = counterexample_imag_gram(t, 0);
    CHECK(w.gap > 1e-9);
    CHECK(w.a_scale < 1.0);  // truncation keeps the second candidate here
    const auto lam = tubal_length(tsvdm(w.better, t), t);
    for (std::size_t j = 0; j < lam.size(); ++j) CHECK(lam[j] <= w.lambda[j]);
}

TEST_CASE("imag-gram witness not applicable when Im g = 0") {
    const Transform t = conj_pair_transform(1.0, Complex(0.2, 0.0));
    CHECK_THROWS_AS(counterexample_imag_gram(t, 0), NotApplicableError);
    const Transform valid = conj_pair_transform(1.0, Complex(0.0, 0.0));
    CHECK_THROWS_AS(counterexample_imag_gram(valid, 0), NotApplicableError);
}

TEST_CASE("witness constructions survive embedding into larger transforms") {
    const Transform t4 = conj_pair_transform(0.9, Complex(0.15, 0.0), 4);
    const CounterexampleWitness w = counterexample_real_gram(t4, 0);
    CHECK(w.gap > 1e-9);
    const double want = (w.big_s + 2 * w.gram.real()) / (w.big_s + w.gram.real());
    const double ratio = (w.err_trunc * w.err_trunc) / (w.err_better * w.err_better);
    CHECK(oracles::rel_err(ratio, want) < 1e-8);

    const Transform t5 = conj_pair_transform(1.2, Complex(0.0, 0.22), 5);
    const CounterexampleWitness wi = counterexample_imag_gram(t5, 0);
    CHECK(wi.gap > 1e-9);
}

TEST_CASE("every in-group-invalid transform admits one of the two constructions") {
    Rng rng(81);
    for (int rep = 0; rep < 20; ++rep) {
        const double big_s = rng.uniform(0.5, 2.0);
        const double mag = rng.uniform(0.05, 0.45) * big_s;
        const double phase = rng.uniform(0.0, 2.0 * 3.14159265358979);
        const Complex g = std::polar(mag, phase);
        const Transform t = conj_pair_transform(big_s, g);
        REQUIRE(t.certificate().has_value());
        if (t.certificate()->valid) continue;  // |g| tiny cannot happen with mag >= 0.05*S
        CounterexampleWitness w;
        if (std::abs(g.real()) > 1e-10 * big_s) {
            w = counterexample_real_gram(t, 0);
        } else {
            w = counterexample_imag_gram(t, 0);
        }
        CHECK(w.gap > 1e-9);
    }
}

TEST_CASE("refute_random finds no witness for valid transforms") {
    Rng rng(82);
    const Transform t = dct_transform(4);
    const Tensor3 x = oracles::random_real_tensor(4, 4, 4, rng);
    double best = 0.0;
    const auto w = refute_random(x, t, std::vector<Eigen::Index>(4, 2), 2000, 5, &best);
    CHECK_FALSE(w.has_value());
    CHECK(best <= 1e-9);
}

TEST_CASE("refute_random at full length cannot find a witness") {
    Rng rng(83);
    const Transform t = dft_transform(4);
    const Tensor3 x = oracles::random_real_tensor(3, 3, 4, rng);
    const auto w = refute_random(x, t, std::vector<Eigen::Index>(t.structure().ell, 3), 500, 7);
    CHECK_FALSE(w.has_value());
}

TEST_CASE("refute_random refutes a cross-group-invalid transform on tube data") {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, 0.5, 0.0, 1.0;
    const Transform t = Transform::build(std::move(m), 1e-10, "shear2");
    REQUIRE(t.certificate().has_value());
    REQUIRE_FALSE(t.certificate()->valid);
    CHECK(t.certificate()->violation->kind == ViolationKind::cross_group);

    // tube with components in both ideals; target length keeps only the first
    Tensor3 ahat(1, 1, 2, Domain::transform, t.id());
    ahat.at(0, 0, 0) = 1.0;
    ahat.at(0, 0, 1) = 1.0;
    const Tensor3 a = from_transform_domain(ahat, t, true);
    const auto w = refute_random(a, t, {1, 0}, 10000, 3);
    REQUIRE(w.has_value());
    CHECK(w->gap > 1e-9);
    CHECK(w->err_better < w->err_trunc);
    // frozen minimizer: err^2 drops from 1.25 to 1.0
    CHECK(w->err_trunc == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));
    CHECK(w->err_better >= 1.0 - 1e-12);
}

TEST_CASE("compare_fixed_rank: scaled truncations agree elementwise") {
    Rng rng(84);
    const Transform q = dct_transform(4);
    const Transform dq = scaled_transform(q, {3.0, 1.0, 1.0, 1.0});
    const Tensor3 x = oracles::random_real_tensor(4, 4, 4, rng);

    const auto all_ones = compare_fixed_rank(x, q, scaled_transform(q, {1, 1, 1, 1}),
                                             MultiRank{{2, 2, 2, 2}});
    CHECK(all_ones.trunc_diff == 0.0);

    const auto cmp = compare_fixed_rank(x, q, dq, MultiRank{{2, 2, 2, 2}});
    CHECK(cmp.trunc_diff <= 1e-9 * frob_norm(x));
    CHECK(std::abs(cmp.err_q - cmp.err_dq) <= 1e-9 * std::max(1.0, cmp.err_q));

    const auto cmp_tr = compare_fixed_rank(x, q, dq, TRank{1});
    CHECK(std::abs(cmp_tr.err_q - cmp_tr.err_dq) <= 1e-9 * std::max(1.0, cmp_tr.err_q));
}

TEST_CASE("compare_gamma: normalized transforms never need more rank") {
    Rng rng(85);
    const Transform q = dct_transform(4);
    const Transform dq = scaled_transform(q, {10.0, 1.0, 1.0, 1.0});
    const Tensor3 x = oracles::random_real_tensor(4, 4, 4, rng);

    const auto equal = compare_gamma(x, q, scaled_transform(q, {1, 1, 1, 1}), 0.9);
    CHECK(equal.r_gamma_q == equal.r_gamma_dq);

    const auto cmp = compare_gamma(x, q, dq, 0.9);
    CHECK(cmp.r_gamma_q <= cmp.r_gamma_dq);

    const auto top = compare_gamma(x, q, dq, 0.999999);
    CHECK(top.r_gamma_q <= top.r_gamma_dq);
}

TEST_CASE("certify: valid transform is confirmed by the search") {
    const Transform t = dct_transform(4);
    CertifyOptions opts;
    opts.refute = true;
    opts.trials = 1500;
    opts.seed = 11;
    const EckartYoungReport rep = certify(t, opts);
    CHECK(rep.certificate.valid);
    CHECK(rep.verdict == Verdict::confirmed_valid);
    CHECK(rep.max_violation <= 1e-9);
    CHECK_FALSE(rep.witness.has_value());
}

TEST_CASE("certify: in-group violations produce closed-form witnesses") {
    CertifyOptions opts;
    opts.refute = true;

    const EckartYoungReport real_rep = certify(conj_pair_transform(1.0, Complex(0.2, 0.0)), opts);
    CHECK(real_rep.verdict == Verdict::refuted_invalid);
    REQUIRE(real_rep.witness.has_value());
    CHECK(real_rep.witness->kind == WitnessKind::real_gram);
    CHECK(real_rep.witness->gap > 1e-9);

    const EckartYoungReport imag_rep = certify(conj_pair_transform(1.0, Complex(0.0, 0.3)), opts);
    REQUIRE(imag_rep.witness.has_value());
    CHECK(imag_rep.witness->kind == WitnessKind::imag_gram);
    CHECK(imag_rep.witness->gap > 1e-9);
}

TEST_CASE("certify: cross-group violation refuted by the random search") {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, 0.5, 0.0, 1.0;
    const Transform t = Transform::build(std::move(m), 1e-10, "shear2");
    CertifyOptions opts;
    opts.refute = true;
    opts.trials = 10000;
    opts.seed = 21;
    const EckartYoungReport rep = certify(t, opts);
    CHECK(rep.verdict == Verdict::refuted_invalid);
    REQUIRE(rep.witness.has_value());
    CHECK(rep.witness->kind == WitnessKind::random_search);
    CHECK(rep.witness->gap > 1e-9);
}

TEST_CASE("certify without refute reports the certificate only") {
    const EckartYoungReport rep = certify(dft_transform(4), CertifyOptions{});
    CHECK(rep.verdict == Verdict::certificate_only);
    CHECK(rep.certificate.valid);
}

}  // TEST_SUITE
