#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& workdir) {
    const std::string cmd =
        "cd " + workdir.string() + " && " + HOPFTK_CLI_PATH + " " + args + " 2>&1";
    std::array<char, 4096> buffer{};
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return result;
    while (fgets(buffer.data(), buffer.size(), pipe) != nullptr)
        result.output += buffer.data();
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hopftk_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Cli, HopfInvariantRunsAndWritesArtifacts) {
    const auto dir = fresh_dir("hopf");
    const auto res = run_cli("hopf-invariant --map hopf --seed 5 --out out", dir);
    EXPECT_EQ(res.exit_code, 0) << res.output;
    EXPECT_TRUE(fs::exists(dir / "out" / "hopf_invariant.json"));
    EXPECT_TRUE(fs::exists(dir / "out" / "fiber_y_0.csv"));
    EXPECT_TRUE(fs::exists(dir / "out" / "fiber_yprime_0.csv"));
    EXPECT_NE(res.output.find("\"hopf_invariant\": 1"), std::string::npos)
        << res.output;
}

TEST(Cli, ReRunsAreByteIdentical) {
    const auto dir1 = fresh_dir("det1");
    const auto dir2 = fresh_dir("det2");
    const std::string args = "hopf-invariant --map 'power(2)' --seed 11 --out out";
    const auto r1 = run_cli(args, dir1);
    const auto r2 = run_cli(args, dir2);
    ASSERT_EQ(r1.exit_code, 0);
    ASSERT_EQ(r2.exit_code, 0);
    EXPECT_EQ(slurp(dir1 / "out" / "hopf_invariant.json"),
              slurp(dir2 / "out" / "hopf_invariant.json"));
    EXPECT_EQ(slurp(dir1 / "out" / "fiber_y_0.csv"),
              slurp(dir2 / "out" / "fiber_y_0.csv"));
    EXPECT_EQ(r1.output, r2.output);

    const std::string vargs = "verify --check theorem-d --seed 7 --out out";
    const auto v1 = run_cli(vargs, dir1);
    const auto v2 = run_cli(vargs, dir2);
    ASSERT_EQ(v1.exit_code, 0);
    EXPECT_EQ(slurp(dir1 / "out" / "verify_theorem-d.json"),
              slurp(dir2 / "out" / "verify_theorem-d.json"));

    const std::string largs = "lipschitz --map stiefel-quat --seed 3 --out out";
    const auto l1 = run_cli(largs, dir1);
    const auto l2 = run_cli(largs, dir2);
    ASSERT_EQ(l1.exit_code, 0);
    EXPECT_EQ(slurp(dir1 / "out" / "lipschitz.json"),
              slurp(dir2 / "out" / "lipschitz.json"));
}

TEST(Cli, VerifyExitCodeContract) {
    const auto dir = fresh_dir("exitcodes");
    EXPECT_EQ(run_cli("verify --check lemma-f --seed 1 --out a", dir).exit_code, 0);
    // perturbed map fails the great-circle check: exit 1
    EXPECT_EQ(run_cli("verify --check great-circles --map 'bump(0.2,0.5)' --seed 1 "
                      "--out b",
                      dir)
                  .exit_code,
              1);
    // an unreachable tolerance exhausts the key-lemma search budget: exit 2
    EXPECT_EQ(run_cli("verify --check key-lemma --seed 1 --tol 1e-300 --samples 5 "
                      "--out c",
                      dir)
                  .exit_code,
              2);
}

TEST(Cli, RejectsBadInvocations) {
    const auto dir = fresh_dir("bad");
    EXPECT_NE(run_cli("verify --check no-such-check --seed 1", dir).exit_code, 0);
    EXPECT_NE(run_cli("lipschitz --map not-a-map --seed 1", dir).exit_code, 0);
    EXPECT_NE(run_cli("lipschitz --map hopf", dir).exit_code, 0);  // missing seed
    const auto res = run_cli(
        R"(lipschitz --map {\"family\":\"hopf-complex\",\"n\":1,\"bogus\":2} --seed 1)",
        dir);
    EXPECT_NE(res.exit_code, 0);
    EXPECT_NE(res.output.find("bogus"), std::string::npos);
}

TEST(Cli, LipschitzMatchesKnownConstants) {
    const auto dir = fresh_dir("lip");
    auto pair_lower_of = [&](const std::string& map, const std::string& out) {
        const auto res = run_cli(
            "lipschitz --map '" + map + "' --seed 9 --samples 2000 --out " + out,
            dir);
        EXPECT_EQ(res.exit_code, 0) << res.output;
        const std::string body = slurp(dir / out / "lipschitz.json");
        const auto pos = body.find("\"pair_lower\": ");
        EXPECT_NE(pos, std::string::npos);
        return std::strtod(body.c_str() + pos + 14, nullptr);
    };
    const double diag = pair_lower_of("diagonal(2)", "d");
    EXPECT_GE(diag, 0.999);
    EXPECT_LE(diag, 1.000001);
    const double hopf = pair_lower_of("hopf", "h");
    EXPECT_GE(hopf, 0.999);
    EXPECT_LE(hopf, 1.000001);
    const double stq = pair_lower_of("stiefel-quat", "s");
    EXPECT_GE(stq, 1.413);
    EXPECT_LE(stq, 1.4143);
}
