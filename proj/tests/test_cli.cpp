#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "zakdd/cli.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(bool(f));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

int shell(const std::string& cmd) {
  int ret = std::system(cmd.c_str());
  REQUIRE(ret != -1);
  return WIFEXITED(ret) ? WEXITSTATUS(ret) : -2;
}

// unique scratch directory per test case, removed on destruction
struct TempDir {
  fs::path path;
  TempDir(const char* tag) {
    path = fs::temp_directory_path() /
           (std::string("zakdd_cli_") + tag + "_" + std::to_string(getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

const char* kExperiments[] = {"ambiguity", "filters",     "ber",
                              "fde",       "diffcomm",    "mub",
                              "radar",     "polarimetry", "papr"};

}  // namespace

TEST_CASE("every canned demo config passes validation unchanged") {
  for (const char* name : kExperiments) {
    std::string cfg = zakdd::demo_config(name);
    INFO(name);
    CHECK(zakdd::validate_config_text(cfg).empty());
  }
  CHECK_THROWS(zakdd::demo_config("no_such_experiment"));
}

TEST_CASE("validation pinpoints parse failures by line and column") {
  auto report =
      zakdd::validate_config_text("{\n  \"experiment\": \"ber\",\n  bad\n}");
  REQUIRE(report.size() == 1);
  CHECK(report[0].rfind("error: parse error at line 3, column 3: ", 0) == 0);
  auto report2 = zakdd::validate_config_text("not json at all");
  REQUIRE(report2.size() == 1);
  CHECK(report2[0].rfind("error: parse error at line 1, column 2: ", 0) == 0);
}

TEST_CASE("validation warns when channel spreads alias across the periods") {
  // Doppler spread 2 * 20 kHz exceeds the 30 kHz Doppler period
  std::string cfg = R"({
  "experiment": "ber",
  "output": "x.csv",
  "grid": {"M": 8, "N": 8, "nu_p_hz": 30000.0},
  "channel": {"model": "veh_a", "nu_max_hz": 20000.0},
  "snr_db": [10.0],
  "trials": 1
})";
  auto report = zakdd::validate_config_text(cfg);
  REQUIRE(report.size() == 1);
  CHECK(report[0].find("warning: 2*nu_max >= nu_p") != std::string::npos);
  // delay spread 2 * 20 us exceeds the 33.3 us delay period
  std::string cfg2 = R"({
  "experiment": "ber",
  "output": "x.csv",
  "grid": {"M": 8, "N": 8, "nu_p_hz": 30000.0},
  "channel": {"paths": [{"delay_s": 20.0e-6}]},
  "snr_db": [10.0],
  "trials": 1
})";
  auto report2 = zakdd::validate_config_text(cfg2);
  REQUIRE(report2.size() == 1);
  CHECK(report2[0].find("warning: 2*tau_max >= tau_p") != std::string::npos);
}

TEST_CASE("validation rejects contract violations as errors") {
  auto bad_exp = zakdd::validate_config_text(
      R"({"experiment": "frobnicate", "output": "x.csv"})");
  REQUIRE(bad_exp.size() == 1);
  CHECK(bad_exp[0].find("error:") == 0);
  CHECK(bad_exp[0].find("unknown experiment") != std::string::npos);

  // ber without a channel cannot measure anything
  auto no_ch = zakdd::validate_config_text(R"({
  "experiment": "ber",
  "output": "x.csv",
  "grid": {"M": 8, "N": 8, "nu_p_hz": 30000.0}
})");
  REQUIRE(no_ch.size() == 1);
  CHECK(no_ch[0].find("needs a channel") != std::string::npos);

  // unbiased bases need odd M*N
  auto even_mub = zakdd::validate_config_text(R"({
  "experiment": "mub",
  "output": "x.csv",
  "grid": {"M": 4, "N": 4, "nu_p_hz": 30000.0}
})");
  REQUIRE(even_mub.size() == 1);
  CHECK(even_mub[0].find("odd") != std::string::npos);
}

TEST_CASE("runs stamp config and seed and reproduce byte for byte") {
  TempDir dir("inproc");
  fs::path old = fs::current_path();
  fs::current_path(dir.path);
  std::string cfg = zakdd::demo_config("ber");
  zakdd::run_config_text(cfg, 1);
  std::string first = slurp(dir.path / "ber.csv");
  fs::remove(dir.path / "ber.csv");
  zakdd::run_config_text(cfg, 1);
  std::string second = slurp(dir.path / "ber.csv");
  fs::current_path(old);
  CHECK(first == second);
  auto ls = lines_of(first);
  REQUIRE(ls.size() >= 4);
  CHECK(ls[0].rfind("# config: {", 0) == 0);
  CHECK(ls[0].find("\"experiment\":\"ber\"") != std::string::npos);
  CHECK(ls[1] == "# seed: 1");
  CHECK(ls[2] == "snr_db,trials,bit_errors,ber,scheme,filter,seed");
  // two snr points x two schemes
  CHECK(ls.size() == 3 + 4);
}

TEST_CASE("binary demo prints the same config the library returns") {
  TempDir dir("demo");
  fs::path out = dir.path / "demo.json";
  int rc = shell(std::string(ZAKDD_BIN) + " demo ber > '" + out.string() + "'");
  CHECK(rc == 0);
  CHECK(slurp(out) == zakdd::demo_config("ber"));
  CHECK(shell(std::string(ZAKDD_BIN) + " demo nope > /dev/null 2>&1") == 1);
}

TEST_CASE("binary runs are identical across reruns and thread counts") {
  TempDir dir("threads");
  std::string cfg = zakdd::demo_config("ber");
  std::string outputs[3];
  const char* sub[3] = {"a", "b", "c"};
  const char* extra[3] = {"", " --threads 3", ""};
  const char* env[3] = {"", "", "ZAKDD_THREADS=3 "};
  for (int i = 0; i < 3; ++i) {
    fs::path d = dir.path / sub[i];
    fs::create_directories(d);
    spit(d / "cfg.json", cfg);
    int rc = shell("cd '" + d.string() + "' && " + env[i] + "'" + ZAKDD_BIN +
                   "'" + extra[i] + " run cfg.json");
    CHECK(rc == 0);
    outputs[i] = slurp(d / "ber.csv");
  }
  CHECK(outputs[0] == outputs[1]);
  CHECK(outputs[0] == outputs[2]);
}

TEST_CASE("binary exit codes separate success, warnings, and errors") {
  TempDir dir("exit");
  fs::path good = dir.path / "good.json";
  spit(good, zakdd::demo_config("filters"));
  fs::path warn = dir.path / "warn.json";
  spit(warn, R"({
  "experiment": "ber",
  "output": "x.csv",
  "grid": {"M": 8, "N": 8, "nu_p_hz": 30000.0},
  "channel": {"model": "veh_a", "nu_max_hz": 20000.0},
  "snr_db": [10.0],
  "trials": 1
})");
  fs::path broken = dir.path / "broken.json";
  spit(broken, "{ nope");
  fs::path log = dir.path / "log.txt";

  CHECK(shell(std::string(ZAKDD_BIN) + " validate '" + good.string() +
              "' > '" + log.string() + "'") == 0);
  CHECK(slurp(log).empty());

  CHECK(shell(std::string(ZAKDD_BIN) + " validate '" + warn.string() +
              "' > '" + log.string() + "'") == 0);
  CHECK(slurp(log).find("warning: 2*nu_max >= nu_p") != std::string::npos);

  CHECK(shell(std::string(ZAKDD_BIN) + " validate '" + broken.string() +
              "' > '" + log.string() + "'") == 1);
  CHECK(slurp(log).find("error: parse error at line") != std::string::npos);

  CHECK(shell(std::string(ZAKDD_BIN) + " run '" + dir.path.string() +
              "/missing.json' 2> '" + log.string() + "'") == 1);
  CHECK(slurp(log).find("cannot read") != std::string::npos);

  // a subcommand is required
  CHECK(shell(std::string(ZAKDD_BIN) + " > /dev/null 2>&1") != 0);
}
