#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spsing/cli.hpp"

using namespace spsing;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("spsing_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
}

}  // namespace

TEST(MatrixText, RoundTrip) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const BitMatrix m = sample(BernoulliModel{Rational(1, 3)}, 1 + seed * 7, seed);
        ASSERT_EQ(matrix_from_text(matrix_to_text(m)), m);
    }
    EXPECT_EQ(matrix_from_text("2 3\n101\n011\n"), BitMatrix::from_rows({"101", "011"}));
    EXPECT_EQ(matrix_from_text("0 0\n"), BitMatrix(0, 0));
}

TEST(MatrixText, ErrorsCarryLineNumbers) {
    auto message = [](const std::string& text) {
        try {
            (void)matrix_from_text(text);
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::ParseError);
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("3 3\n100\n010\n").find("line 4"), std::string::npos);
    EXPECT_NE(message("2 2\n10\n0x\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("2 2\n101\n01\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("two two\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("").find("header"), std::string::npos);
    EXPECT_NE(message("1 1\n1\n1\n").find("line 3"), std::string::npos);
}

TEST(CertificateJson, RoundTripsAndVerifies) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const BitMatrix m = sample(CombinatorialModel{2}, 8, seed);
        const auto cert = is_singular_exact(m);
        const auto back = certificate_from_json(nlohmann::json::parse(certificate_to_json(cert).dump()));
        ASSERT_TRUE(verify_certificate(m, back));
        ASSERT_EQ(back.verdict, cert.verdict);
    }
    EXPECT_THROW((void)certificate_from_json(nlohmann::json{{"verdict", "maybe"}, {"evidence", "kernel_vector"}}), Error);
}

TEST(CmdSample, Examples) {
    const auto dir = scratch("sample");
    EXPECT_EQ(run({"sample", "--model", "bernoulli", "--n", "4", "--p", "0", "--out", (dir / "z.txt").string()}).code, 0);
    EXPECT_EQ(slurp(dir / "z.txt"), "4 4\n0000\n0000\n0000\n0000\n");
    EXPECT_EQ(run({"sample", "--model", "comb", "--n", "4", "--d", "4"}).out, "4 4\n1111\n1111\n1111\n1111\n");

    const std::vector<std::string> args{"sample", "--model", "bernoulli", "--n", "30", "--p", "1/5", "--seed", "9"};
    const auto a = run(args), b = run(args);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(matrix_from_text(a.out), sample(BernoulliModel{Rational(1, 5)}, 30, 9));
}

TEST(CmdSample, InvalidFlags) {
    EXPECT_EQ(run({"sample", "--model", "bernoulli", "--n", "4"}).code, 2);
    EXPECT_EQ(run({"sample", "--model", "comb", "--n", "4", "--d", "5"}).code, 2);
    EXPECT_EQ(run({"sample", "--model", "other", "--n", "4", "--d", "1"}).code, 2);
    EXPECT_EQ(run({"sample", "--n", "x"}).code, 2);
    const auto r = run({"bogus"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(CmdCertify, ExitCodesAndWitness) {
    const auto dir = scratch("certify");
    const auto id = write_file(dir / "id.txt", matrix_to_text(BitMatrix::identity(5)));
    EXPECT_EQ(run({"certify", "--in", id}).code, 0);

    const auto dup = write_file(dir / "dup.txt", "3 3\n110\n011\n110\n");
    const auto r = run({"certify", "--in", dup, "--json"});
    EXPECT_EQ(r.code, 10);
    const auto cert = certificate_from_json(nlohmann::json::parse(r.out));
    EXPECT_EQ(cert.evidence, Evidence::KernelVector);
    EXPECT_TRUE(verify_certificate(matrix_from_text(slurp(dup)), cert));

    const auto cut = write_file(dir / "cut.txt", "3 3\n100\n010\n");
    const auto bad = run({"certify", "--in", cut});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("line 4"), std::string::npos) << bad.err;

    EXPECT_EQ(run({"certify", "--in", (dir / "absent.txt").string()}).code, 2);
    EXPECT_EQ(run({"certify", "--in", write_file(dir / "rect.txt", "2 3\n100\n010\n")}).code, 2);
}

TEST(CmdCertify, JsonMatchesLibrary) {
    const auto dir = scratch("certify_lib");
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const BitMatrix m = sample(BernoulliModel{Rational(1, 10)}, 25, seed);
        const auto path = write_file(dir / "m.txt", matrix_to_text(m));
        EXPECT_EQ(run({"certify", "--in", path, "--json"}).out, certificate_to_json(is_singular_exact(m)).dump(2) + "\n");
    }
}

TEST(CmdBounds, Examples) {
    EXPECT_EQ(run({"bounds", "--formula", "p_even", "--s", "0", "--p", "1/2"}).out, "1/1\n1\n");
    EXPECT_EQ(run({"bounds", "--formula", "p_even", "--s", "3", "--p", "3/10"}).out, "133/250\n0.532\n");
    EXPECT_EQ(run({"bounds", "--formula", "union_ber", "--n", "10", "--p", "1/2", "--smax", "3"}).out.substr(0, 8), "175/512\n");
    EXPECT_EQ(run({"bounds", "--formula", "binom_pm", "--n", "4", "--p", "1/2", "--d", "2"}).out, "3/8\n0.375\n");
    EXPECT_EQ(run({"bounds", "--formula", "atom_ber", "--x", "1,1,1,1", "--p", "1/2"}).out, "3/8\n0.375\nargmax 2/1\n");
    EXPECT_EQ(run({"bounds", "--formula", "atom_comb", "--x", "1,2,3,4", "--d", "2"}).out.substr(0, 4), "1/3\n");
    EXPECT_EQ(run({"bounds", "--formula", "union_comb", "--n", "9", "--q", "3", "--smax", "2", "--P", "1/2,3/8"}).code, 0);
}

TEST(CmdBounds, MatchesLibrary) {
    std::ostringstream expected;
    const auto v = union_bound_ber(500, Rational(1, 50), 7);
    expected << "<= " << v.upper->to_string(20) << '\n';
    EXPECT_EQ(run({"bounds", "--formula", "union_ber", "--n", "500", "--p", "0.02", "--smax", "7"}).out, expected.str());
}

TEST(CmdBounds, ErrorsAndBudget) {
    EXPECT_EQ(run({"bounds", "--formula", "p_even", "--s", "3"}).code, 2);
    EXPECT_EQ(run({"bounds", "--formula", "nope"}).code, 2);
    EXPECT_EQ(run({"bounds", "--formula", "p_even", "--s", "3", "--p", "abc"}).code, 2);
    std::string ones = "1";
    for (int i = 1; i < 40; ++i) ones += ",1";
    EXPECT_EQ(run({"bounds", "--formula", "atom_ber", "--x", ones, "--p", "1/2"}).code, 3);
    EXPECT_EQ(run({"bounds", "--formula", "atom_comb", "--x", ones, "--d", "20"}).code, 3);
}

TEST(CmdSweep, SingleCellAndReproducible) {
    const auto dir = scratch("sweep");
    const auto out = (dir / "one.csv").string();
    const std::vector<std::string> args{"sweep", "--model", "bernoulli", "--n", "10", "--c", "1", "--trials", "1",
                                        "--seed", "5", "--out", out};
    ASSERT_EQ(run(args).code, 0);
    const std::string first = slurp(out);
    EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 2);
    ASSERT_EQ(run(args).code, 0);
    EXPECT_EQ(slurp(out), first);
}

TEST(CmdSweep, MissingDirectoryFailsBeforeWork) {
    const auto dir = scratch("sweep_missing");
    const auto r = run({"sweep", "--n", "10", "--c", "1", "--trials", "1", "--out", (dir / "no" / "x.csv").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(std::filesystem::exists(dir / "no"));
}

TEST(CmdSweep, ConfigMergedUnderFlags) {
    const auto dir = scratch("sweep_config");
    const auto cfg = write_file(dir / "sweep.json", R"({"model": "comb", "n_grid": [12, 16], "c_grid": ["1/2", 1.5],
        "trials_per_cell": 4, "master_seed": 3, "output": ")" + (dir / "a.csv").string() + R"(", "svg": true})");
    ASSERT_EQ(run({"sweep", "--config", cfg}).code, 0);
    const std::string a = slurp(dir / "a.csv");
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 5);
    EXPECT_NE(a.find("combinatorial,16,3/2,"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(dir / "a.svg"));

    ASSERT_EQ(run({"sweep", "--config", cfg, "--n", "20", "--out", (dir / "b.csv").string()}).code, 0);
    const std::string b = slurp(dir / "b.csv");
    EXPECT_EQ(std::count(b.begin(), b.end(), '\n'), 3);
    EXPECT_NE(b.find("combinatorial,20,1/2,"), std::string::npos);

    // library equivalence
    SweepConfig direct;
    direct.model = ModelKind::Combinatorial;
    direct.n_grid = {20};
    direct.c_grid = {Rational(1, 2), Rational(3, 2)};
    direct.trials_per_cell = 4;
    direct.master_seed = 3;
    EXPECT_EQ(b, aggregate_csv(run_sweep(direct).cells));

    EXPECT_EQ(run({"sweep", "--config", write_file(dir / "bad.json", "{oops")}).code, 2);
    EXPECT_EQ(run({"sweep", "--config", write_file(dir / "zero.json", R"({"n_grid":[5],"c_grid":[1],"trials_per_cell":0})")}).code, 2);
}

TEST(CmdAnalyze, Reports) {
    const auto dir = scratch("analyze");
    const auto id = write_file(dir / "id.txt", matrix_to_text(BitMatrix::identity(4)));
    const auto r = run({"analyze", "--in", id});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(nlohmann::json::parse(r.out).at("status"), "trivial kernel");

    const auto dup = write_file(dir / "dup.txt", "3 3\n101\n011\n101\n");
    const auto left = nlohmann::json::parse(run({"analyze", "--in", dup, "--side", "left"}).out);
    EXPECT_EQ(left.at("gf2").at("min_support"), 2);
    EXPECT_EQ(left.at("rational").at("min_support"), 2);

    const auto dcol = write_file(dir / "dcol.txt", "3 3\n100\n011\n011\n");
    const auto right = nlohmann::json::parse(run({"analyze", "--in", dcol}).out);
    EXPECT_EQ(right.at("gf2").at("min_support"), 2);

    const auto zero = write_file(dir / "zero.txt", matrix_to_text(BitMatrix(25, 25)));
    const auto big = run({"analyze", "--in", zero});
    EXPECT_EQ(big.code, 3);
    EXPECT_NE(big.err.find("KernelTooLarge"), std::string::npos);
    EXPECT_EQ(run({"analyze", "--in", id, "--side", "up"}).code, 2);
}
