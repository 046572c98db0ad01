#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "disclab/io.hpp"

namespace fs = std::filesystem;
using disclab::Json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const fs::path& scratch() {
  static const fs::path dir = [] {
    const fs::path p = fs::temp_directory_path() / "disclab_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

/// Runs the CLI with `args` (shell-quoted by the caller); stdout and stderr captured separately.
RunResult run(const std::string& args) {
  const fs::path err_file = scratch() / "stderr.txt";
  const std::string cmd = std::string("'") + DISCLAB_CLI + "' " + args + " 2>'" + err_file.string() + "'";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = disclab::read_file(err_file);
  return r;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  for (const auto& line : split(csv, '\n')) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

}  // namespace

TEST(Cli, BodyInfoReportsDiskArea) {
  const auto r = run("body info --spec 'kind=disk,r=0.25'");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_GE(lines.size(), 2u);
  EXPECT_EQ(lines[0], "theta,support_lo,support_hi,width,area,circumradius");
  const auto cols = split(lines[1], ',');
  ASSERT_EQ(cols.size(), 6u);
  EXPECT_NEAR(std::stod(cols[4]), 0.19635, 1e-5);
  EXPECT_NEAR(std::stod(cols[3]), 0.5, 1e-15);
}

TEST(Cli, UsageErrorsExitTwo) {
  const auto unknown = run("frobnicate");
  EXPECT_EQ(unknown.exit_code, 2);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run("").exit_code, 2);
  EXPECT_EQ(run("verify cassels --n 0").exit_code, 2);
  EXPECT_EQ(run("body info --spec 'kind=blob'").exit_code, 2);
  EXPECT_EQ(run("disc --body 'kind=disk,r=0.25' --points 'kind=grid,K=4,L=4' --lambda 0.5:0.2").exit_code, 2);
  const fs::path cfg = scratch() / "bad.cfg";
  disclab::write_file(cfg, "body { kind = disk }\nsizes = [4, 8\n");
  EXPECT_EQ(run("experiment scaling --config '" + cfg.string() + "'").exit_code, 2);
}

TEST(Cli, VerifyCasselsPasses) {
  const auto r = run("verify cassels --n 100 --seed 7");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["check"], "cassels");
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j["N"], 100);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_GE(j["lhs"].get<double>(), j["rhs"].get<double>());
  EXPECT_EQ(run("verify cassels --n 100 --seed 7").out, r.out);
}

TEST(Cli, VerifyReportsShareOneShape) {
  for (const std::string args : {"verify podkorytov --profile tent", "verify bilateral --profile semicircle",
                                 "verify chords --sigma 0.75", "verify lemma-g --sigma 0.75",
                                 "verify equivalence --body 'kind=disk,r=0.25' --expect 1"}) {
    const auto r = run(args);
    ASSERT_EQ(r.exit_code, 0) << args << "\n" << r.err;
    const Json j = Json::parse(r.out);
    for (const char* key : {"check", "grid", "min_ratio", "max_ratio", "pass"}) {
      EXPECT_TRUE(j.contains(key)) << args << " lacks " << key;
    }
    EXPECT_EQ(j["pass"], true) << args;
  }
  // A failed check exits 1.
  EXPECT_EQ(run("verify equivalence --body 'kind=disk,r=0.25' --expect 3 --tol 0.1").exit_code, 1);
}

TEST(Cli, PointsPrintSeedAndReproduce) {
  const auto first = run("points --gen 'kind=uniform,j=20'");
  ASSERT_EQ(first.exit_code, 0) << first.err;
  std::smatch m;
  ASSERT_TRUE(std::regex_search(first.err, m, std::regex("seed=([0-9]+)"))) << first.err;
  const std::string seed = m[1];
  const auto again = run("points --gen 'kind=uniform,j=20' --seed " + seed);
  ASSERT_EQ(again.exit_code, 0);
  EXPECT_EQ(again.out, first.out);
  const auto lines = data_lines(first.out);
  ASSERT_EQ(lines.size(), 21u);
  EXPECT_EQ(lines[0], "x,y");
  const fs::path out = scratch() / "pts.csv";
  ASSERT_EQ(run("points --gen 'kind=uniform,j=20' --seed " + seed + " --out '" + out.string() + "'").exit_code, 0);
  EXPECT_EQ(disclab::read_file(out), first.out);
}

TEST(Cli, DiscEmitsEngineFields) {
  const auto pv = run("disc --body 'kind=disk,r=0.25' --points 'kind=grid,K=4,L=4' --policy M0=4,M_max=8");
  ASSERT_EQ(pv.exit_code, 0) << pv.err;
  const Json a = Json::parse(pv.out);
  EXPECT_EQ(a["engine"], "parseval");
  EXPECT_GT(a["value"].get<double>(), 0.0);
  EXPECT_TRUE(a.contains("tail_bound"));
  EXPECT_EQ(a["truncation_radius"], 32.0);
  EXPECT_EQ(a["config"]["N"], 16);
  const auto mc = run("disc --body 'kind=disk,r=0.25' --points 'kind=grid,K=4,L=4' --engine mc --samples 5000 --seed 3");
  ASSERT_EQ(mc.exit_code, 0) << mc.err;
  const Json b = Json::parse(mc.out);
  EXPECT_EQ(b["engine"], "mc");
  EXPECT_EQ(b["samples"], 5000);
  EXPECT_GT(b["std_error"].get<double>(), 0.0);
  EXPECT_EQ(b["config"]["seed"], 3);
  // A CSV file drops the grid tag, so radii are absolute: 32 = 8·max(K, L).
  const fs::path pts = scratch() / "grid.csv";
  ASSERT_EQ(run("points --gen 'kind=grid,K=4,L=4' --out '" + pts.string() + "'").exit_code, 0);
  const auto from_file =
      run("disc --body 'kind=disk,r=0.25' --points '" + pts.string() + "' --policy M0=16,M_max=32");
  ASSERT_EQ(from_file.exit_code, 0) << from_file.err;
  const Json c = Json::parse(from_file.out);
  EXPECT_EQ(c["truncation_radius"], 32.0);
  EXPECT_NEAR(c["value"].get<double>() / a["value"].get<double>(), 1.0, 1e-9);
}

TEST(Cli, FtWritesColumns) {
  const auto r = run("ft --body 'kind=disk,r=0.25' --theta 0 --rho-max 4 --every 8");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_GE(lines.size(), 3u);
  EXPECT_EQ(lines[0], "rho,re,im,abs,method");
  const auto row0 = split(lines[1], ',');
  ASSERT_EQ(row0.size(), 5u);
  EXPECT_EQ(std::stod(row0[0]), 0.0);
  EXPECT_NEAR(std::stod(row0[1]), 0.19634954084936207, 1e-15);
  EXPECT_EQ(row0[4], "closed_form");
}

TEST(Cli, ExperimentScalingWritesCsvJsonAndManifest) {
  const fs::path dir = scratch() / "exp";
  const fs::path cfg = scratch() / "scaling.cfg";
  disclab::write_file(cfg,
                      "# disk with square grids, short sweep\n"
                      "body { kind = disk, r = 0.25 }\n"
                      "generator { kind = square_grid }\n"
                      "sizes = [64, 144, 256, 576]\n"
                      "engine { M0 = 4, M_max = 8 }\n"
                      "exponent = 0.5\n"
                      "tolerance = 1\n");
  const auto r = run("experiment scaling --config '" + cfg.string() + "' --seed 5 --out-dir '" + dir.string() + "'");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rows = data_lines(disclab::read_file(dir / "scaling.csv"));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "N,D2,err,ratio");
  EXPECT_EQ(split(rows[1], ',')[0], "64");
  const Json report = Json::parse(disclab::read_file(dir / "scaling.json"));
  EXPECT_EQ(report["rows"].size(), 4u);
  EXPECT_EQ(report["seed"], 5);
  EXPECT_TRUE(report.contains("pass"));
  const Json manifest = Json::parse(disclab::read_file(dir / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 5);
  ASSERT_EQ(manifest["outputs"].size(), 2u);
  for (const auto& o : manifest["outputs"]) {
    EXPECT_EQ(o["sha256"], disclab::sha256_file(o["path"].get<std::string>()));
  }
  // Same config and seed: byte-identical CSV.
  const fs::path dir2 = scratch() / "exp2";
  ASSERT_EQ(run("experiment scaling --config '" + cfg.string() + "' --seed 5 --out-dir '" + dir2.string() + "'")
                .exit_code,
            0);
  EXPECT_EQ(disclab::read_file(dir2 / "scaling.csv"), disclab::read_file(dir / "scaling.csv"));
  // An unattainable tolerance fails the report and exits 1.
  const fs::path strict = scratch() / "strict.cfg";
  std::string text = disclab::read_file(cfg);
  text.replace(text.find("tolerance = 1"), 13, "tolerance = 1e-9");
  disclab::write_file(strict, text);
  EXPECT_EQ(run("experiment scaling --config '" + strict.string() + "' --seed 5 --out-dir '" + dir.string() + "'")
                .exit_code,
            1);
  EXPECT_EQ(run("experiment envelope --config '" + cfg.string() + "' --out-dir '" + dir.string() + "'").exit_code, 2);
}

TEST(Cli, ManifestFlagWritesFile) {
  const fs::path path = scratch() / "m.json";
  ASSERT_EQ(run("--manifest '" + path.string() + "' verify lemma-g --sigma 0.6").exit_code, 0);
  const Json m = Json::parse(disclab::read_file(path));
  EXPECT_EQ(m["command"], "verify lemma-g");
  EXPECT_EQ(m["tool"], "disclab");
}
