#include "bingham/linalg.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kTmp = BINGHAM_TEST_TMP;

fs::path write_file(const std::string& name, const std::string& text) {
  fs::create_directories(kTmp);
  const fs::path p = kTmp / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(BINGHAM_CLI) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<json> read_lines(const fs::path& p) {
  std::vector<json> out;
  std::istringstream in(read_file(p));
  for (std::string line; std::getline(in, line);) out.push_back(json::parse(line));
  return out;
}

const char* kDiag = "0,0,0\n0,2,0\n0,0,5\n";

}  // namespace

TEST(Cli, SampleWritesJsonLines) {
  const fs::path m = write_file("a.csv", kDiag);
  const fs::path out = kTmp / "a.jsonl";
  ASSERT_EQ(run("sample --matrix " + m.string() + " --count 50 --seed 42 --out " + out.string()), 0);
  const auto lines = read_lines(out);
  ASSERT_EQ(lines.size(), 51u);
  for (std::size_t i = 0; i < 50; ++i) {
    ASSERT_EQ(lines[i]["x"].size(), 3u);
    EXPECT_GE(lines[i]["proposals"].get<long>(), 1);
  }
  const json& tail = lines.back();
  EXPECT_EQ(tail["seed"].get<long>(), 42);
  EXPECT_EQ(tail["n"].get<int>(), 25);
  EXPECT_EQ(tail["gap"].get<double>(), 5.0);
  EXPECT_GT(tail["acceptance_rate"].get<double>(), 0.0);
}

TEST(Cli, SampleIsReproducible) {
  const fs::path m = write_file("b.csv", kDiag);
  const fs::path o1 = kTmp / "b1.jsonl", o2 = kTmp / "b2.jsonl", o3 = kTmp / "b3.jsonl";
  ASSERT_EQ(run("sample --matrix " + m.string() + " --count 1000 --seed 42 --out " + o1.string()), 0);
  ASSERT_EQ(run("sample --matrix " + m.string() + " --count 1000 --seed 42 --out " + o2.string()), 0);
  ASSERT_EQ(run("sample --matrix " + m.string() + " --count 1000 --seed 42 --threads 4 --out " + o3.string()), 0);
  EXPECT_EQ(read_file(o1), read_file(o2));
  EXPECT_EQ(read_file(o1), read_file(o3));
}

TEST(Cli, SeedFromEnvironment) {
  const fs::path m = write_file("c.csv", kDiag);
  const fs::path o1 = kTmp / "c1.jsonl", o2 = kTmp / "c2.jsonl";
  ASSERT_EQ(run("sample --matrix " + m.string() + " --count 20 --seed 7 --out " + o1.string()), 0);
  ASSERT_EQ(run("sample --matrix " + m.string() + " --count 20 --out " + o2.string(), "BINGHAM_SEED=7"), 0);
  EXPECT_EQ(read_file(o1), read_file(o2));
  EXPECT_EQ(run("sample --matrix " + m.string() + " --count 20 --out " + o2.string(), "BINGHAM_SEED=x"), 2);
}

TEST(Cli, IdentityGivesCenteredSamples) {
  const fs::path m = write_file("eye.json", R"({"dim": 4, "entries": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]})");
  const fs::path out = kTmp / "eye.jsonl";
  ASSERT_EQ(run("sample --matrix " + m.string() + " --count 1000 --seed 1 --out " + out.string()), 0);
  const auto lines = read_lines(out);
  std::vector<double> mean(4, 0.0);
  for (std::size_t i = 0; i < 1000; ++i)
    for (int j = 0; j < 4; ++j) mean[static_cast<std::size_t>(j)] += lines[i]["x"][static_cast<std::size_t>(j)].get<double>() / 1000.0;
  double norm = 0.0;
  for (double v : mean) norm += v * v;
  EXPECT_LE(std::sqrt(norm), 4.0 / std::sqrt(1000.0));
}

TEST(Cli, TripletInput) {
  const fs::path m = write_file("t.tri", "0,1,0.5\n2,2,3\n");
  const fs::path out = kTmp / "t.jsonl";
  ASSERT_EQ(run("sample --matrix " + m.string() + " --count 5 --out " + out.string()), 0);
  EXPECT_EQ(read_lines(out).front()["x"].size(), 3u);
}

TEST(Cli, ErrorsLeaveNoOutput) {
  const fs::path bad = write_file("bad.csv", "1,2\n3,oops\n");
  const fs::path rect = write_file("rect.csv", "1,2,3\n4,5,6\n");
  const fs::path out = kTmp / "never.jsonl";
  fs::remove(out);
  EXPECT_EQ(run("sample --matrix " + bad.string() + " --out " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(run("sample --matrix " + rect.string() + " --out " + out.string()), 3);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(run("sample --matrix " + (kTmp / "missing.csv").string() + " --out " + out.string()), 2);
  EXPECT_EQ(run("sample --matrix " + bad.string() + " --format yaml --out " + out.string()), 2);
  EXPECT_EQ(run("sample --count 3"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, PosteriorSummary) {
  const fs::path y = write_file("eye3.csv", "1,0,0\n0,1,0\n0,0,1\n");
  const fs::path out = kTmp / "post.jsonl";
  ASSERT_EQ(run("posterior --observation " + y.string() + " --gamma 1 --count 2000 --seed 3 --out " + out.string()), 0);
  const auto lines = read_lines(out);
  ASSERT_EQ(lines.size(), 2002u);
  const json& s = lines.back();
  EXPECT_NEAR(s["trace"].get<double>(), 1.0, 1e-12);
  for (int i = 0; i < 3; ++i) {
    const double diag = s["mmse"][static_cast<std::size_t>(i)][static_cast<std::size_t>(i)].get<double>();
    EXPECT_NEAR(diag, 1.0 / 3.0, 4.0 * std::sqrt((0.2 - 1.0 / 9.0) / 2000.0));
  }
}

TEST(Cli, PosteriorPlantedRecovery) {
  // noiseless Y = x0 x0^T at d = 5
  const std::vector<double> x0{0.5, -0.5, 0.5, 0.1, std::sqrt(1.0 - 0.76)};
  std::ostringstream text;
  text.precision(17);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) text << (j ? "," : "") << x0[static_cast<std::size_t>(i)] * x0[static_cast<std::size_t>(j)];
    text << "\n";
  }
  const fs::path y = write_file("planted.csv", text.str());
  const fs::path out = kTmp / "planted.jsonl";
  ASSERT_EQ(run("posterior --observation " + y.string() + " --gamma 0.05 --count 1000 --seed 4 --out " + out.string()), 0);
  const json s = read_lines(out).back();
  double dot = 0.0;
  for (std::size_t i = 0; i < 5; ++i) dot += s["top_direction"][i].get<double>() * x0[i];
  EXPECT_GT(std::abs(dot), 0.99);
}

TEST(Cli, PosteriorRejectsBadGamma) {
  const fs::path y = write_file("g.csv", "1,0\n0,1\n");
  const fs::path out = kTmp / "g.jsonl";
  fs::remove(out);
  EXPECT_EQ(run("posterior --observation " + y.string() + " --gamma 0 --out " + out.string()), 4);
  EXPECT_EQ(run("posterior --observation " + y.string() + " --gamma -2 --out " + out.string()), 4);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, ValidateSuites) {
  const fs::path out = kTmp / "moments.json";
  ASSERT_EQ(run("validate --suite moments --out " + out.string()), 0);
  const json report = json::parse(read_file(out));
  EXPECT_TRUE(report["pass"].get<bool>());
  for (const auto& r : report["results"]) {
    EXPECT_TRUE(r.contains("test") && r.contains("statistic") && r.contains("threshold"));
    EXPECT_TRUE(r["pass"].get<bool>());
  }

  const fs::path ratio = kTmp / "ratio.json";
  ASSERT_EQ(run("validate --suite ratio --out " + ratio.string()), 0);
  const json rr = json::parse(read_file(ratio));
  std::vector<double> best;
  for (const auto& r : rr["results"]) {
    if (r["test"].get<std::string>().rfind("ratio.best_ratio_sigma_sq_", 0) == 0) best.push_back(r["statistic"]);
  }
  ASSERT_EQ(best.size(), 4u);
  for (std::size_t i = 1; i < best.size(); ++i) EXPECT_GT(best[i], best[i - 1]);

  EXPECT_EQ(run("validate --suite nonsense"), 2);
}

TEST(Cli, ValidateAll) {
  const fs::path out = kTmp / "all.json";
  ASSERT_EQ(run("validate --suite all --seed 5 --out " + out.string()), 0);
  const json report = json::parse(read_file(out));
  EXPECT_EQ(report["seed"].get<long>(), 5);
  EXPECT_GE(report["results"].size(), 20u);
}
