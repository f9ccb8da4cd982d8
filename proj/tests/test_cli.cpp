#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "oracles.hpp"
#include "tubalg/io.hpp"
#include "tubalg/optimality.hpp"

using namespace tubalg;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    auto dir = fs::temp_directory_path() / "tubalg_cli_tests";
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const std::string& stdout_file = "") {
    std::string cmd = std::string(TUBALG_CLI_PATH) + " " + args;
    cmd += stdout_file.empty() ? " > /dev/null 2>&1" : " > " + stdout_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

json run_cli_json(const std::string& args) {
    const auto out = (work_dir() / "stdout.json").string();
    REQUIRE(run_cli(args, out) == 0);
    std::ifstream in(out);
    return json::parse(in);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("certify a builtin dct is valid with unit weights") {
    const json rep = run_cli_json("certify builtin:dct:4");
    CHECK(rep["schema"] == 1);
    CHECK(rep["valid"] == true);
    CHECK(rep["ell"] == 4);
    REQUIRE(rep["mu"].size() == 4);
    for (const auto& mu : rep["mu"]) CHECK(std::abs(mu.get<double>() - 1.0) < 1e-12);
}

TEST_CASE("transform check on a crafted csv") {
    const auto dir = work_dir();
    const auto csv = (dir / "pair.csv").string();
    write_transform_csv(csv, conj_pair_transform(1.0, Complex(0.2, 0.0)).matrix());
    const json rep = run_cli_json("transform check " + csv);
    CHECK(rep["valid"] == false);
    CHECK(rep["real_ring"] == true);
    CHECK(rep["violation"]["kind"] == "in_group_non_orthogonal");
}

TEST_CASE("gen + tsvdm2 report meets the energy target") {
    const auto dir = work_dir();
    const auto x = (dir / "x.tbt").string();
    REQUIRE(run_cli("--seed 5 gen tensor --dims 4,4,4 --out " + x) == 0);
    const json rep = run_cli_json("tsvdm2 " + x + " --transform builtin:dct:4 --gamma 0.9 --out " +
                                  (dir / "approx.tbt").string());
    CHECK(rep["schema"] == 1);
    CHECK(rep["retained_energy"].get<double>() >= 0.9);
    CHECK(rep["r_gamma"].get<int>() >= 1);

    // the written approximation matches the reported error
    const Tensor3 orig = read_tbt1(x);
    const Tensor3 approx = read_tbt1((dir / "approx.tbt").string());
    CHECK(std::abs(frob_norm(sub(orig, approx)) - rep["error"].get<double>()) < 1e-12);
}

TEST_CASE("truncate with an invalid multirank exits 2 and names the constraint") {
    const auto dir = work_dir();
    const auto x = (dir / "tube.tbt").string();
    const auto pair_csv = (dir / "pair2.csv").string();
    // nonzero real tube of length 2 under the conjugate-pair transform
    Eigen::MatrixXcd m(2, 2);
    m << Complex(1, 2), Complex(3, -1), Complex(1, -2), Complex(3, 1);
    write_transform_csv(pair_csv, m);
    Tensor3 tube(1, 1, 2);
    tube.at(0, 0, 0) = 0.7;
    tube.at(0, 0, 1) = -0.4;
    write_tbt1(x, tube);

    const auto err_file = (dir / "stderr.txt").string();
    const std::string cmd = std::string(TUBALG_CLI_PATH) + " truncate " + x +
                            " --transform " + pair_csv +
                            " --multirank 1,0 > /dev/null 2> " + err_file;
    const int code = WEXITSTATUS(std::system(cmd.c_str()));
    CHECK(code == 2);
    std::ifstream err(err_file);
    const std::string text((std::istreambuf_iterator<char>(err)),
                           std::istreambuf_iterator<char>());
    CHECK(text.find("group") != std::string::npos);

    // the valid multirank (1,1) succeeds and reproduces the tube
    const json ok = run_cli_json("truncate " + x + " --transform " + pair_csv +
                                 " --multirank 1,1 --out " + (dir / "t.tbt").string());
    CHECK(ok["relative_error"].get<double>() < 1e-10);
}

TEST_CASE("tsvdm without a spec writes the factor triple") {
    const auto dir = work_dir();
    const auto x = (dir / "fx.tbt").string();
    REQUIRE(run_cli("--seed 13 gen tensor --dims 3,2,4 --out " + x) == 0);
    const auto prefix = (dir / "factors").string();
    const json rep = run_cli_json("tsvdm " + x + " --transform builtin:dft:4 --out " + prefix);
    CHECK(rep["input_ranks"]["t_rank"].get<int>() == 2);
    const Tensor3 u = read_tbt1(prefix + ".u.tbt");
    const Tensor3 s = read_tbt1(prefix + ".s.tbt");
    const Tensor3 v = read_tbt1(prefix + ".v.tbt");
    const Transform t = dft_transform(4);
    const Tensor3 recon = starm(starm(u, s, t), conj_transpose(v, t), t);
    CHECK(oracles::rel_diff(recon, read_tbt1(x)) < 1e-10);
}

TEST_CASE("missing files exit 1") {
    CHECK(run_cli("tsvdm /nonexistent.tbt --transform builtin:dct:4") == 1);
    CHECK(run_cli("transform check /nonexistent.csv") == 1);
}

TEST_CASE("mul against the library") {
    Rng rng(101);
    const auto dir = work_dir();
    const Tensor3 a = oracles::random_real_tensor(2, 3, 4, rng);
    const Tensor3 b = oracles::random_real_tensor(3, 2, 4, rng);
    write_tbt1((dir / "a.tbt").string(), a);
    write_tbt1((dir / "b.tbt").string(), b);
    REQUIRE(run_cli("mul " + (dir / "a.tbt").string() + " " + (dir / "b.tbt").string() +
                    " --transform builtin:dft:4 --out " + (dir / "c.tbt").string()) == 0);
    const Tensor3 c = read_tbt1((dir / "c.tbt").string());
    CHECK(oracles::rel_diff(c, starm(a, b, dft_transform(4))) < 1e-12);
}

TEST_CASE("compare subcommand emits the gamma inequality") {
    const auto dir = work_dir();
    const auto x = (dir / "cx.tbt").string();
    REQUIRE(run_cli("--seed 9 gen tensor --dims 4,4,4 --out " + x) == 0);
    const json rep = run_cli_json("compare " + x +
                                  " --transform builtin:dct:4 --weights 10,1,1,1 --gamma 0.9");
    CHECK(rep["holds"] == true);
    CHECK(rep["r_gamma_q"].get<int>() <= rep["r_gamma_dq"].get<int>());

    const json fixed = run_cli_json("compare " + x +
                                    " --transform builtin:dct:4 --weights 3,1,1,1 --trank 2");
    CHECK(std::abs(fixed["err_q"].get<double>() - fixed["err_dq"].get<double>()) < 1e-9);
}

TEST_CASE("dmd fit and predict round trip through a model directory") {
    const auto dir = work_dir();
    const auto x = (dir / "traj.tbt").string();
    const auto model = (dir / "model").string();
    REQUIRE(run_cli("--seed 3 gen trajectory --m 4 --p 12 --trank 2 "
                    "--transform builtin:random:4:7 --out " + x) == 0);
    const auto meta_out = (dir / "fit.json").string();
    REQUIRE(run_cli("dmd fit " + x + " --transform builtin:random:4:7 --rank trank:4 --out " +
                    model, meta_out) == 0);
    std::ifstream meta_in(meta_out);
    const json meta = json::parse(meta_in);
    CHECK(meta["fit_error"].get<double>() <= 1e-8);

    // extract the first snapshot as x0 and predict one step
    const Tensor3 traj = read_tbt1(x);
    Tensor3 x0(traj.rows(), 1, traj.tubes());
    for (Eigen::Index k = 0; k < traj.tubes(); ++k)
        for (Eigen::Index i = 0; i < traj.rows(); ++i) x0.at(i, 0, k) = traj.at(i, 0, k);
    write_tbt1((dir / "x0.tbt").string(), x0);
    REQUIRE(run_cli("dmd predict " + model + " " + (dir / "x0.tbt").string() +
                    " --steps 3 --out " + (dir / "pred.tbt").string()) == 0);
    const Tensor3 pred = read_tbt1((dir / "pred.tbt").string());
    Tensor3 want(traj.rows(), 3, traj.tubes());
    for (Eigen::Index k = 0; k < traj.tubes(); ++k)
        for (Eigen::Index j = 0; j < 3; ++j)
            for (Eigen::Index i = 0; i < traj.rows(); ++i)
                want.at(i, j, k) = traj.at(i, j + 1, k);
    CHECK(oracles::rel_diff(pred, want) < 1e-6);
}

TEST_CASE("byte-identical reports for identical inputs and seeds") {
    const auto dir = work_dir();
    const auto x = (dir / "det.tbt").string();
    REQUIRE(run_cli("--seed 42 gen tensor --dims 3,3,4 --out " + x) == 0);
    const auto r1 = (dir / "r1.json").string();
    const auto r2 = (dir / "r2.json").string();
    REQUIRE(run_cli("tsvdm " + x + " --transform builtin:dft:4 --trank 2", r1) == 0);
    REQUIRE(run_cli("tsvdm " + x + " --transform builtin:dft:4 --trank 2", r2) == 0);
    std::ifstream a(r1), b(r2);
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(!sa.empty());
}

TEST_CASE("certify --refute writes witness tensors for an invalid transform") {
    const auto dir = work_dir();
    const auto csv = (dir / "bad.csv").string();
    REQUIRE(run_cli("gen transform --kind realgram --n 2 --s 1.0 --gre 0.2 --out " + csv) == 0);
    const auto prefix = (dir / "w").string();
    const json rep = run_cli_json("certify " + csv + " --refute --witness-prefix " + prefix);
    CHECK(rep["verdict"] == "refuted_invalid");
    CHECK(rep["witness"]["kind"] == "real_gram");
    CHECK(rep["witness"]["gap"].get<double>() > 1e-9);
    const Tensor3 wx = read_tbt1(prefix + "_x.tbt");
    const Tensor3 wb = read_tbt1(prefix + "_better.tbt");
    const Transform t = Transform::build(read_transform_matrix(csv), 1e-10, "bad");
    const Tensor3 trunc = truncate(tsvdm(wx, t), t, TubalLength{{1}});
    CHECK(frob_norm(sub(wx, wb)) < frob_norm(sub(wx, trunc)));
}

}  // TEST_SUITE
