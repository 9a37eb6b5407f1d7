#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(CONVLAB_BINARY) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::current_path() / "cli_scratch" / ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CriticalPoint) {
  const auto r = run("tq --coeffs 1 --manifest " + path("m.json"));
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["t_q"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j["q_max"].get<double>(), 0.25);
  const json m = json::parse(slurp(path("m.json")));
  EXPECT_EQ(m["subcommand"], "tq");
  EXPECT_EQ(m["config"]["coeffs"], "1");
  EXPECT_TRUE(m.contains("version"));
  EXPECT_TRUE(m.contains("wall_seconds"));
}

TEST_F(Cli, InvalidCoefficientsExitTwo) {
  EXPECT_EQ(run("tq --coeffs 0,0 --manifest " + path("m.json")).code, 2);
  EXPECT_EQ(run("tq --coeffs 1,-2 --manifest " + path("m.json")).code, 2);
  EXPECT_EQ(run("tq").code, 2);
  EXPECT_EQ(run("nonsense").code, 2);
  EXPECT_EQ(run("construct --coeffs 1 --points 100 --manifest " + path("m.json")).code, 2);
}

TEST_F(Cli, SeriesDiagonal) {
  const auto r = run("series --coeffs 1 --rows 6 --out " + path("t.json"));
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(slurp(path("t.json")));
  EXPECT_EQ(j["diagonal"], json({"1", "1", "2", "5", "14", "42"}));
  EXPECT_EQ(j["lagrange"], j["diagonal"]);
  EXPECT_TRUE(fs::exists(path("t.json.manifest.json")));
}

TEST_F(Cli, Help) {
  for (const char* sub : {"tq", "series", "disk", "construct", "witness", "bose", "verify"}) {
    const auto r = run(std::string(sub) + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
  }
  EXPECT_NE(run("tq --help").out.find("t_Q"), std::string::npos);
  EXPECT_NE(run("witness --help").out.find("f_{a,t}"), std::string::npos);
}

TEST_F(Cli, DeterministicOutputs) {
  const std::string disk = "disk --coeffs 1,1 --seed 7 --pairs 2000 --radial 16 --angular 32 --out ";
  ASSERT_EQ(run(disk + path("a.json")).code, 0);
  ASSERT_EQ(run(disk + path("b.json")).code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));

  const std::string co =
      "construct --coeffs 1 --extent 16 --points 256 --psi gaussian:sigma=0.5,mass=0.2 --tol 1e-10 ";
  ASSERT_EQ(run(co + "--out " + path("a.cvlf") + " --report " + path("a_rep.json")).code, 0);
  ASSERT_EQ(run(co + "--out " + path("b.cvlf") + " --report " + path("b_rep.json")).code, 0);
  EXPECT_EQ(slurp(path("a.cvlf")), slurp(path("b.cvlf")));
  EXPECT_EQ(slurp(path("a_rep.json")), slurp(path("b_rep.json")));
  const json rep = json::parse(slurp(path("a_rep.json")));
  EXPECT_NEAR(rep["report"]["final_mass"].get<double>(), 0.2763932, 1e-6);

  // verify reads the constructed field back
  const auto v = run("verify --coeffs 1 --field " + path("a.cvlf"));
  ASSERT_EQ(v.code, 0);
  EXPECT_TRUE(json::parse(v.out)["inequality"].get<bool>());
}

TEST_F(Cli, NotConvergedExitThreeWithReport) {
  const auto r = run("construct --coeffs 1 --extent 16 --points 256 --psi gaussian:sigma=0.5,mass=0.2 "
                     "--max-iter 3 --out " + path("f.cvlf") + " --report " + path("rep.json"));
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(fs::exists(path("f.cvlf")));
  const json rep = json::parse(slurp(path("rep.json")));
  EXPECT_EQ(rep["report"]["iterations"], 3);
  EXPECT_FALSE(rep["report"]["converged"].get<bool>());
}

TEST_F(Cli, MassTooLargeExitTwo) {
  EXPECT_EQ(run("construct --coeffs 1 --points 256 --psi gaussian:sigma=0.5,mass=0.3 --manifest " + path("m.json")).code,
            2);
}

TEST_F(Cli, WitnessAndBose) {
  const auto w = run("witness --a 0.5 --t 1.0 --dim 1 --extent 64 --points 4096 --out " + path("w.csv"));
  ASSERT_EQ(w.code, 0);
  const json wj = json::parse(w.out);
  EXPECT_NEAR(wj["mass"].get<double>(), 0.5, 1e-3);
  EXPECT_TRUE(wj["inequality_holds"].get<bool>());
  std::ifstream csv(path("w.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "x,value");

  const auto neg = run("witness --a 0.6 --t 1.0 --extent 64 --points 4096 --manifest " + path("m.json"));
  EXPECT_EQ(neg.code, 0);
  EXPECT_FALSE(json::parse(neg.out)["inequality_holds"].get<bool>());

  const auto b = run("bose --m 1 --xi 1.0 --mu 0.01 --V gaussian:sigma=0.5,mass=0.1 --dim 1 --extent 32 "
                     "--points 2048 --report " + path("bose.json") + " --out " + path("u.cvlf"));
  ASSERT_EQ(b.code, 0);
  const json bj = json::parse(slurp(path("bose.json")));
  EXPECT_EQ(bj["certificate"]["verdict"], "pass");
  EXPECT_TRUE(fs::exists(path("u.cvlf")));
}

TEST_F(Cli, ThreadsDoNotChangeResults) {
  const std::string disk = "disk --coeffs 2,0,1 --seed 3 --pairs 3000 --radial 16 --angular 32 --out ";
  ASSERT_EQ(run(disk + path("one.json")).code, 0);
  ASSERT_EQ(run("").code, 2);
  const std::string cmd = "CONVLAB_THREADS=4 " + std::string(CONVLAB_BINARY) + " " + disk + path("four.json") +
                          " > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(slurp(path("one.json")), slurp(path("four.json")));
}
