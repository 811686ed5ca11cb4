#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "pythag/harness.hpp"

using namespace pythag;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

class HarnessTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("pythag_harness_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

} // namespace

TEST_F(HarnessTest, SingleRecordAgainstAllSignsBruteForce) {
    RunConfig cfg;
    cfg.n_list = {15};
    cfg.m_exponent = std::log(8.0) / std::log(15.0);
    cfg.y_policy = YPolicy::fixed;
    cfg.Y_fixed = 4;
    auto recs = run_sweep(cfg);
    ASSERT_EQ(recs.size(), 1u);
    const auto& r = recs[0];
    ASSERT_TRUE(r.error.empty()) << r.error;
    EXPECT_NEAR(r.M, 8.0, 1e-12);
    auto w = build_weight_system(15, r.M, 4);
    long double expect = 0;
    for (long long x3 = 0; x3 <= 16; x3 += 2)
        expect += w.phi3(static_cast<double>(x3)) *
                  static_cast<long double>(oracle::two_squares(static_cast<u64>(225 + x3 * x3)).size());
    EXPECT_NEAR(r.measured, static_cast<double>(expect), 1e-12 * static_cast<double>(expect));
    EXPECT_EQ(r.p_n, "1241/1350");
    EXPECT_NEAR(r.ratio, r.measured / r.predicted, 1e-15);
}

TEST_F(HarnessTest, EmptyListGivesHeaderOnly) {
    RunConfig cfg;
    EXPECT_TRUE(run_sweep(cfg).empty());
    cfg.output_path = (dir_ / "empty.csv").string();
    emit_report({}, cfg);
    EXPECT_EQ(slurp(cfg.output_path), std::string(report_header) + "\n");
    cfg.format = ReportFormat::jsonl;
    emit_report({}, cfg);
    EXPECT_EQ(slurp(cfg.output_path), "");
}

TEST_F(HarnessTest, DeterministicAcrossRunsAndThreads) {
    RunConfig cfg;
    cfg.n_list = {10001, 10003, 10005, 10007};
    cfg.record_timing = false;
    const std::string a = render_report(run_sweep(cfg), ReportFormat::csv);
    const std::string b = render_report(run_sweep(cfg), ReportFormat::csv);
    cfg.threads = 3;
    const std::string c = render_report(run_sweep(cfg), ReportFormat::csv);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
}

TEST_F(HarnessTest, FailuresAreCapturedPerRecord) {
    RunConfig cfg;
    cfg.n_list = {15, 16, 21};
    auto recs = run_sweep(cfg);
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_TRUE(recs[0].error.empty());
    EXPECT_FALSE(recs[1].error.empty());
    EXPECT_TRUE(std::isnan(recs[1].ratio));
    EXPECT_TRUE(recs[2].error.empty());
    cfg.n_list = {105};
    cfg.y_policy = YPolicy::fixed;
    cfg.Y_fixed = 1000;
    EXPECT_FALSE(run_sweep(cfg)[0].error.empty());
}

TEST_F(HarnessTest, YPolicyClamp) {
    RunConfig cfg;
    EXPECT_EQ(sweep_Y(cfg, 15, 8), 1.0); // 8 / log^3 15 < 1
    const double M = std::pow(100003.0, 0.9);
    EXPECT_NEAR(sweep_Y(cfg, 100003, M), M / std::pow(std::log(100003.0), 3), 1e-9);
}

TEST_F(HarnessTest, CsvFormat) {
    SweepRecord r;
    r.n = 15;
    r.M = 8;
    r.Y = 1;
    r.measured = 1.0 / 3.0;
    r.predicted = 2;
    r.ratio = 1.0 / 6.0;
    r.p_n = "1241/1350";
    r.wall_ms = 12;
    RunConfig cfg;
    cfg.output_path = (dir_ / "one.csv").string();
    emit_report({r}, cfg);
    EXPECT_EQ(slurp(cfg.output_path),
              "n,M,Y,measured,predicted,ratio,P_n,wall_ms\n15,8,1,0.333333333333,2,0.166666666667,1241/1350,12\n");
}

TEST_F(HarnessTest, JsonLinesKeys) {
    RunConfig cfg;
    cfg.n_list = {15, 21};
    cfg.format = ReportFormat::jsonl;
    cfg.output_path = (dir_ / "out.jsonl").string();
    emit_report(run_sweep(cfg), cfg);
    std::ifstream f(cfg.output_path);
    std::string line;
    int lines = 0;
    while (std::getline(f, line)) {
        auto j = nlohmann::ordered_json::parse(line);
        std::vector<std::string> keys;
        for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
        EXPECT_EQ(keys, (std::vector<std::string>{"n", "M", "Y", "measured", "predicted", "ratio", "P_n", "wall_ms"}));
        ++lines;
    }
    EXPECT_EQ(lines, 2);
}

TEST_F(HarnessTest, AtomicReplaceAndErrors) {
    const fs::path target = dir_ / "report.csv";
    {
        std::ofstream f(target);
        f << "old contents that are longer than the new report will be ...........................\n";
    }
    write_file_atomic(target.string(), "new\n");
    EXPECT_EQ(slurp(target), "new\n");
    for (const auto& e : fs::directory_iterator(dir_))
        EXPECT_EQ(e.path().filename().string().find(".tmp."), std::string::npos) << "temporary file left behind";
    EXPECT_THROW(write_file_atomic((dir_ / "missing" / "x.csv").string(), "x"), IoError);
    RunConfig cfg;
    EXPECT_THROW(emit_report({}, cfg), IoError);
}
