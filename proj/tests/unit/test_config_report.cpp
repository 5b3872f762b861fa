#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bubble/config.hpp"
#include "bubble/errors.hpp"
#include "bubble/report.hpp"

using namespace bubble;

namespace {

std::string field_of(const std::string& toml) {
    try {
        parse_config(toml);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::validation);
        return e.field();
    }
    return "";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Config, DefaultsFromEmptyFile) {
    const auto c = parse_config("");
    EXPECT_EQ(c.n_theta, 64);
    EXPECT_EQ(c.epsilons.size(), 3u);
    EXPECT_TRUE(c.curvature().is_constant());
    EXPECT_EQ(c.theta_star(), 0.0);
}

TEST(Config, ReadsSections) {
    const auto c = parse_config("[curvature]\nK = [[0, 0, 2.0], [1, 0, 0.1]]\nkappa_cos = [2.0, 1.0]\n"
                                "[bubble]\nlambda = [1.0]\nepsilon = [0.2, 0.1]\ntheta = 0.5\n[run]\njobs = 3\n");
    EXPECT_EQ(c.K_terms.size(), 2u);
    EXPECT_EQ(c.lambdas, std::vector<double>{1.0});
    EXPECT_EQ(c.jobs, 3);
    EXPECT_DOUBLE_EQ(c.theta_star(), 0.5);
    EXPECT_FALSE(c.curvature().is_constant());
}

TEST(Config, ErrorsNameTheField) {
    EXPECT_EQ(field_of("[bubble]\nlambda = [-1.0]\n"), "bubble.lambda[0]");
    EXPECT_EQ(field_of("[bubble]\nepsilon = [0.05, 0.1]\n"), "bubble.epsilon[1]");
    EXPECT_EQ(field_of("[grid]\nn_theta = 65\n"), "grid.n_theta");
    EXPECT_EQ(field_of("[grid]\nn_thetaa = 64\n"), "grid.n_thetaa");
    EXPECT_EQ(field_of("[gird]\n"), "gird");
    EXPECT_EQ(field_of("[tolerances]\nnewton_tol = 1e-12\n"), "tolerances.newton_tol");
    EXPECT_EQ(field_of("[grid]\nn_r = \"many\"\n"), "grid.n_r");
    EXPECT_EQ(field_of("[curvature]\nkappa_cos = [0.5, 1.0]\n"), "curvature");
    EXPECT_EQ(field_of("[grid\n"), "<syntax>");
}

TEST(Config, JobsPrecedence) {
    const auto c = parse_config("[run]\njobs = 2\n");
    unsetenv("BUBBLE_LAB_JOBS");
    EXPECT_EQ(resolve_jobs(std::nullopt, c), 2);
    setenv("BUBBLE_LAB_JOBS", "5", 1);
    EXPECT_EQ(resolve_jobs(std::nullopt, c), 5);
    EXPECT_EQ(resolve_jobs(3, c), 3);
    setenv("BUBBLE_LAB_JOBS", "x", 1);
    EXPECT_THROW(resolve_jobs(std::nullopt, c), Error);
    unsetenv("BUBBLE_LAB_JOBS");
    EXPECT_THROW(resolve_jobs(0, c), Error);
}

TEST(Report, SeventeenDigits) {
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(format_real(1.0), "1");
    Table t{"t", {"a", "b", "c"}, {}};
    t.add({1.0 / 3.0, std::int64_t{4}, std::string("x,y")});
    EXPECT_EQ(to_csv(t), "a,b,c\n0.33333333333333331,4,\"x,y\"\n");
    EXPECT_THROW(t.add({1.0}), Error);
}

TEST(Report, JsonNonFiniteIsNull) {
    nlohmann::ordered_json j;
    j["a"] = 0.1;
    j["b"] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_EQ(dump_json(j, 0), "{\"a\":0.10000000000000001,\"b\":null}");
}

TEST(Report, WritesDeterministicFiles) {
    RunReport r;
    r.subcommand = "demo";
    r.config = parse_config("").echo();
    r.checks.push_back({"c", true, 1e-3, 1e-2, ""});
    Table t{"demo_table", {"x"}, {}};
    t.add({2.0 / 3.0});
    r.tables.push_back(t);
    const auto base = std::filesystem::temp_directory_path() / "bubble_report_test";
    std::filesystem::remove_all(base);
    write_report(r, (base / "a").string());
    write_report(r, (base / "b").string());
    EXPECT_EQ(slurp(base / "a" / "demo_table.csv"), slurp(base / "b" / "demo_table.csv"));
    const auto ja = nlohmann::json::parse(slurp(base / "a" / "demo.json"));
    EXPECT_EQ(ja["schema_version"], report_schema_version);
    EXPECT_EQ(ja["status"], "pass");
    EXPECT_EQ(ja["tables"][0]["file"], "demo_table.csv");
    std::filesystem::remove_all(base);
}
