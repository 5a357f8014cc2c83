#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <regex>
#include <sstream>

#include "galign/cli.hpp"
#include "galign/export.hpp"
#include "galign/json.hpp"
#include "testing/support.hpp"

namespace fs = std::filesystem;
using galign::testing::fixture_path;
using galign::testing::reference_model_path;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = galign::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string ref() { return reference_model_path().string(); }

// Exit status of the real binary with output discarded.
int spawn(const std::string& args) {
  std::string command = std::string(GALIGN_BINARY) + " " + args + " >/dev/null 2>&1";
  int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("galign-cli-" + std::to_string(::getpid()) + "-" +
                                         ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

TEST(Cli, EvalTable) {
  auto r = cli({"eval", ref()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::regex_search(r.out, std::regex(R"(\nO6\s+33%\s+33\.00\s+29\.75\s+in-doubt\s+Reduced)"))) << r.out;
  EXPECT_TRUE(std::regex_search(r.out, std::regex(R"(\nO4\s+80%\s+80\.00\s+80\.00\s+satisfied)"))) << r.out;
}

TEST(Cli, EvalWithoutConfidence) {
  auto r = cli({"eval", ref(), "--no-confidence"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(std::regex_search(r.out, std::regex(R"(\nO6\s+33%\s+33\.00\s+33\.00\s+satisfied)"))) << r.out;
}

TEST(Cli, EvalJsonMatchesReport) {
  auto r = cli({"eval", ref(), "--json"});
  EXPECT_EQ(r.code, 0);
  auto g = galign::testing::reference_model();
  EXPECT_EQ(r.out, galign::export_json_report(g, galign::evaluate(g), galign::validate(g)));
}

TEST(Cli, EvalOptions) {
  auto r = cli({"eval", ref(), "--or-policy", "best", "--no-calibration"});
  EXPECT_EQ(r.code, 0);
  auto bad = cli({"eval", ref(), "--or-policy", "coin"});
  EXPECT_EQ(bad.code, 2);
  auto select = cli({"eval", ref(), "--select", "nogroup=C"});
  EXPECT_EQ(select.code, 1);
  EXPECT_NE(select.err.find("unknown or-group"), std::string::npos);
  EXPECT_EQ(cli({"eval", ref(), "--select", "broken"}).code, 2);
}

TEST(Cli, ValidateExitCodes) {
  EXPECT_EQ(cli({"validate", ref()}).code, 0);
  for (const char* name : {"cycle.galign", "unit-mismatch.galign", "dangling-reference.galign",
                           "zero-magnitude.galign", "syntax-errors.galign"}) {
    EXPECT_EQ(cli({"validate", fixture_path(name).string()}).code, 1) << name;
  }
  auto warn = cli({"validate", fixture_path("non-canonical-confidence.galign").string()});
  EXPECT_EQ(warn.code, 0);
  EXPECT_NE(warn.out.find("warning[non-canonical-confidence] L1"), std::string::npos) << warn.out;
}

TEST(Cli, ValidateEmptyFileReportsSpan) {
  auto r = cli({"validate", fixture_path("empty.galign").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("empty.galign:1:1: error: expected 'model'"), std::string::npos) << r.out;
}

TEST(Cli, ValidateJson) {
  auto r = cli({"validate", fixture_path("cycle.galign").string(), "--json"});
  EXPECT_EQ(r.code, 1);
  auto doc = galign::Json::parse(r.out);
  EXPECT_FALSE(doc["valid"].get<bool>());
  EXPECT_EQ(doc["diagnostics"][0]["code"], "cycle");
}

TEST(Cli, ModelErrorsInOtherCommands) {
  auto r = cli({"eval", fixture_path("syntax-errors.galign").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("syntax-errors.galign:8:3: error:"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"eval", fixture_path("cycle.galign").string()}).code, 1);
}

TEST(Cli, UsageErrors) {
  auto unknown = cli({"eval", ref(), "--bogus"});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("Usage:"), std::string::npos) << unknown.err;
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"eval", "/no/such/file.galign"}).code, 2);
  EXPECT_EQ(cli({"attribute", ref(), "--from", "R1"}).code, 2);
  auto help = cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("whatif"), std::string::npos);
}

TEST(Cli, Attribute) {
  auto r = cli({"attribute", ref(), "--from", "R1", "--to", "O7"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("raw:        1.818182 months"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("adjusted:   1.363636 months"), std::string::npos);
  EXPECT_NE(r.out.find("chain C E G"), std::string::npos);
  auto json = galign::Json::parse(cli({"attribute", ref(), "--from", "R1", "--to", "O7", "--json"}).out);
  EXPECT_NEAR(json["adjusted_amount"].get<double>(), 15.0 / 11.0, 1e-12);
  EXPECT_EQ(cli({"attribute", ref(), "--from", "NOPE", "--to", "O7"}).code, 1);
}

TEST(Cli, Prioritize) {
  auto r = cli({"prioritize", ref(), "--objectives", "O7"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(std::regex_search(r.out, std::regex(R"(\n2\s+R1\s+0\.454545)"))) << r.out;
  auto json = galign::Json::parse(cli({"prioritize", ref(), "--json"}).out);
  EXPECT_EQ(json["priorities"].size(), 3u);
  EXPECT_EQ(cli({"prioritize", ref(), "--objectives", "XX"}).code, 1);
}

TEST(Cli, WhatIf) {
  auto r = cli({"whatif", ref(), "--set-confidence", "F=1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::regex_search(r.out, std::regex(R"(\nO6\s+in-doubt -> satisfied)"))) << r.out;
  EXPECT_NE(r.out.find("1 status change(s)"), std::string::npos);
  auto json = galign::Json::parse(cli({"whatif", ref(), "--exclude", "R1", "--json"}).out);
  EXPECT_EQ(json["objectives"][0]["scenario"]["status"], "unsatisfied");
  auto amount = cli({"whatif", ref(), "--set-amount", "G=2 months", "--include", "R2", "--json"});
  EXPECT_EQ(amount.code, 0) << amount.err;
  EXPECT_EQ(cli({"whatif", ref(), "--set-amount", "G=2%"}).code, 1);
  EXPECT_EQ(cli({"whatif", ref(), "--set-confidence", "F"}).code, 2);
  EXPECT_EQ(cli({"whatif", ref(), "--set-confidence", "F=high"}).code, 2);
  EXPECT_EQ(cli({"whatif", ref(), "--set-confidence", "ZZ=1"}).code, 1);
}

TEST(Cli, Prompts) {
  auto r = cli({"prompts", ref()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "no prompts\n");
  auto json = galign::Json::parse(cli({"prompts", ref(), "--json"}).out);
  EXPECT_TRUE(json["prompts"].empty());
}

TEST(Cli, Exports) {
  TempDir tmp;
  auto dot_path = tmp.path() / "ref.dot";
  EXPECT_EQ(cli({"export-dot", ref(), "--with-eval", "-o", dot_path.string()}).code, 0);
  EXPECT_EQ(galign::testing::read_text(dot_path),
            galign::testing::read_text(galign::testing::source_dir() / "tests" / "golden" / "reference.dot"));
  auto json_path = tmp.path() / "ref.json";
  EXPECT_EQ(cli({"export-json", ref(), "-o", json_path.string()}).code, 0);
  EXPECT_EQ(galign::testing::read_text(json_path), cli({"eval", ref(), "--json"}).out);
  EXPECT_EQ(cli({"export-dot", ref(), "-o", (tmp.path() / "missing" / "x.dot").string()}).code, 2);
}

TEST(Cli, Library) {
  TempDir tmp;
  std::string lib = (tmp.path() / "lib.jsonl").string();
  auto add = cli({"library", "add", "--library", lib, "--id", "E1", "--focus", "Geometry Creation Time",
                  "--estimated", "80%", "--actual", "60%", "--author", "John Smith", "--recorded-at", "2024-01-01"});
  EXPECT_EQ(add.code, 0) << add.err;
  EXPECT_EQ(cli({"library", "--library", lib, "add", "--id", "E2", "--focus", "Lead Time", "--estimated",
                 "3 months", "--author", "John Smith"})
                .code,
            0);
  EXPECT_EQ(cli({"library", "add", "--library", lib, "--id", "E1", "--focus", "x", "--estimated", "1%"}).code, 1);
  EXPECT_EQ(cli({"library", "add", "--library", lib, "--id", "E3", "--focus", "x", "--estimated", "lots"}).code, 2);
  auto query = cli({"library", "query", "geometry", "--library", lib, "--json"});
  EXPECT_EQ(query.code, 0);
  auto doc = galign::Json::parse(query.out);
  ASSERT_EQ(doc["entries"].size(), 1u);
  EXPECT_EQ(doc["entries"][0]["id"], "E1");
  auto cal = cli({"library", "calibration", "John Smith", "--library", lib});
  EXPECT_EQ(cal.code, 0);
  EXPECT_EQ(cal.out, "0.75 (from 1 outcome(s))\n");
  EXPECT_EQ(cli({"library", "--library", lib}).code, 2);
}

TEST(CliBinary, ExitCodes) {
  EXPECT_EQ(spawn("eval " + ref()), 0);
  EXPECT_EQ(spawn("validate " + fixture_path("cycle.galign").string()), 1);
  EXPECT_EQ(spawn("eval " + ref() + " --bogus"), 2);
  EXPECT_EQ(spawn("eval /no/such/file.galign"), 2);
  EXPECT_EQ(spawn("--help"), 0);
}

TEST(CliBinary, UnknownFlagPrintsUsageOnStderr) {
  std::string command = std::string(GALIGN_BINARY) + " eval " + ref() + " --bogus 2>&1 >/dev/null";
  FILE* pipe = ::popen(command.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string captured;
  char buffer[256];
  while (std::fgets(buffer, sizeof buffer, pipe)) captured += buffer;
  int status = ::pclose(pipe);
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_NE(captured.find("Usage:"), std::string::npos) << captured;
}
