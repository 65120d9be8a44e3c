#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "ppi/cli.hpp"

using namespace ppi;
using cli::RunConfig;

namespace {

std::string dump(const Matrix& t) { return matrix_to_json(t).dump(); }

cli::CommandResult run(const std::string& command, const std::string& input, const std::string& second = "") {
    RunConfig cfg;
    cfg.command = command;
    cfg.input = input;
    cfg.second = second;
    return cli::run(cfg);
}

Matrix non_power_example() {
    Matrix t = Matrix::Zero(3, 3);
    t(1, 0) = 1.0;
    t(0, 1) = t(2, 1) = 1.0 / std::sqrt(2.0);
    return t;
}

} // namespace

TEST(MatrixJson, RoundTrip) {
    Matrix u = random_unitary(4, 3);
    EXPECT_EQ(matrix_from_json(json::parse(matrix_to_json(u).dump())), u);
}

TEST(MatrixJson, Rejections) {
    EXPECT_THROW(matrix_from_json(json::parse(R"({"rows":2,"cols":2,"re":[[1,0],[0]]})")), InputError);
    EXPECT_THROW(matrix_from_json(json::parse(R"({"rows":1,"cols":1})")), InputError);
    EXPECT_THROW(matrix_from_json(json::parse(R"({"rows":1,"cols":1,"re":[["x"]]})")), InputError);
    Matrix real_only = matrix_from_json(json::parse(R"({"rows":1,"cols":2,"re":[[1,2]]})"));
    EXPECT_EQ(real_only(0, 1), Complex(2.0));
}

TEST(HwJson, RoundTrip) {
    auto plant = plant_single({2, {{3, 1}}, 4});
    HWDecomposition back = hw_decomposition_from_json(json::parse(to_json(plant.truth).dump()));
    EXPECT_EQ(back.blocks, plant.truth.blocks);
    EXPECT_TRUE(verify(plant.op, back).passed());
}

TEST(FamilyJson, RoundTrip) {
    auto fam = plant_family({2, {{{Label::u(), Label::truncated(2)}, 2, 9}, {{Label::truncated(3), Label::u()}, 1, 4}}, 2});
    FamilyDecomposition back = family_decomposition_from_json(json::parse(to_json(fam.truth).dump()));
    EXPECT_EQ(index_profile(back), index_profile(fam.truth));
    EXPECT_TRUE(verify_family(fam.ops, back).passed());
}

TEST(Cli, AnalyzeTruncatedShift) {
    auto r = run("analyze", dump(truncated_shift(3)));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_TRUE(r.report["verdict"].get<bool>());
}

TEST(Cli, AnalyzeNonSquareIsInputError) {
    EXPECT_EQ(run("analyze", dump(Matrix::Zero(2, 3))).exit_code, 2);
    EXPECT_EQ(run("analyze", "{not json").exit_code, 2);
    EXPECT_EQ(run("analyze", "/nonexistent/file.json").exit_code, 2);
}

TEST(Cli, AnalyzeFlagsPowerTwo) {
    auto r = run("analyze", dump(non_power_example()));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_EQ(r.report["first_failing_power"].get<int>(), 2);
    EXPECT_TRUE(r.report["partial_isometry"].get<bool>());
}

TEST(Cli, DecomposeExamples) {
    auto r = run("decompose", dump(truncated_shift(4)));
    ASSERT_EQ(r.exit_code, 0);
    ASSERT_EQ(r.report["blocks"].size(), 1u);
    EXPECT_EQ(r.report["blocks"][0]["p"].get<int>(), 4);
    EXPECT_EQ(r.report["blocks"][0]["mult"].get<int>(), 1);

    r = run("decompose", dump(random_unitary(3, 8)));
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_TRUE(r.report["blocks"].empty());
    EXPECT_EQ(r.report["dim_u"].get<int>(), 3);

    EXPECT_EQ(run("decompose", dump(non_power_example())).exit_code, 1);
}

TEST(Cli, DecomposeFamilyExamples) {
    Matrix a = kron(truncated_shift(2), identity(2));
    Matrix b = kron(identity(2), truncated_shift(2));
    json fam = {{"operators", {matrix_to_json(a), matrix_to_json(b)}}};
    auto r = run("decompose-family", fam.dump());
    ASSERT_EQ(r.exit_code, 0) << r.text;
    ASSERT_EQ(r.report["summands"].size(), 1u);
    EXPECT_EQ(r.report["summands"][0]["index"], json::parse(R"(["p:2","p:2"])"));

    Matrix j2 = truncated_shift(2);
    json bad = json::array({matrix_to_json(j2), matrix_to_json(j2.adjoint())});
    r = run("decompose-family", bad.dump());
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_FALSE(r.report["violations"].empty());
}

TEST(Cli, OrbitClassify) {
    auto r = run("orbit-classify", R"({"nodes":3,"edges":[[0,1],[1,2]]})");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.report["chains"], json::parse("[3]"));

    r = run("orbit-classify", R"({"nodes":1,"edges":[],"future_flags":[0]})");
    EXPECT_EQ(r.report["s_count"].get<int>(), 1);

    EXPECT_EQ(run("orbit-classify", R"({"nodes":3,"edges":[[0,2],[1,2]]})").exit_code, 2);

    RunConfig cfg;
    cfg.command = "orbit-classify";
    cfg.input = R"({"nodes":5,"edges":[[0,1],[1,0],[2,3]]})";
    cfg.cross_check = true;
    r = cli::run(cfg);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_TRUE(r.report["cross_check"]["agree"].get<bool>());
}

TEST(Cli, PlantVerifyRoundTrip) {
    auto planted = run("plant", R"({"dim_u":2,"mults":{"2":1,"3":2},"seed":12})");
    ASSERT_EQ(planted.exit_code, 0);
    auto op = planted.report["operator"].dump();
    auto dec = run("decompose", op);
    ASSERT_EQ(dec.exit_code, 0);
    EXPECT_EQ(run("verify", op, dec.report.dump()).exit_code, 0);
    EXPECT_EQ(run("verify", op, planted.report.dump()).exit_code, 0);

    json wrong = dec.report;
    wrong["blocks"][0]["mult"] = 5;
    EXPECT_NE(run("verify", op, wrong.dump()).exit_code, 0);
}

TEST(Cli, PlantFamilyAndVerify) {
    auto planted = run("plant", R"({"M":2,"seed":3,"summands":[{"index":["u","p:2"],"mult_dim":2},{"index":["p:3","p:1"],"mult_dim":1}]})");
    ASSERT_EQ(planted.exit_code, 0) << planted.text;
    json ops = {{"operators", planted.report["operators"]}};
    EXPECT_EQ(run("verify", ops.dump(), planted.report.dump()).exit_code, 0);
    auto dec = run("decompose-family", ops.dump());
    ASSERT_EQ(dec.exit_code, 0);
    EXPECT_EQ(dec.report["summands"].size(), 2u);
}

TEST(Cli, SeedOverrideIsDeterministic) {
    RunConfig cfg;
    cfg.command = "plant";
    cfg.input = R"({"mults":{"2":2}})";
    cfg.seed = 41;
    EXPECT_EQ(cli::run(cfg).report, cli::run(cfg).report);
}

TEST(Cli, Batch) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "ppi_batch_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "a.json") << dump(truncated_shift(3));
    std::ofstream(dir / "b.json") << dump(non_power_example());
    std::ofstream(dir / "ignored.txt") << "x";
    RunConfig cfg;
    cfg.command = "analyze";
    cfg.batch = dir.string();
    auto r = cli::run(cfg);
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_EQ(r.report["files"].size(), 2u);
    EXPECT_EQ(r.report["files"]["a.json"]["exit_code"].get<int>(), 0);
    fs::remove_all(dir);
}

TEST(Cli, BadTolerance) {
    RunConfig cfg;
    cfg.command = "analyze";
    cfg.input = dump(truncated_shift(2));
    cfg.tol.abs_tol = -1.0;
    EXPECT_EQ(cli::run(cfg).exit_code, 2);
    cfg.tol.abs_tol = 1e-9;
    cfg.command = "nope";
    EXPECT_EQ(cli::run(cfg).exit_code, 2);
}
