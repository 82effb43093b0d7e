#include <gtest/gtest.h>

#include <filesystem>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "process.hpp"
#include "synthetic.hpp"

namespace psmaudit {
namespace {

using nlohmann::ordered_json;
using testing::read_file;
using testing::run_tool;
using testing::ToolResult;
using testing::write_lines;

const std::string kTool = PSM_AUDIT_BIN;

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<testing::TempDir>("cli");
    auto lines = testing::zipf_lines(12000, 3000, 1.0, 77);
    std::vector<std::string> target(lines.begin(), lines.begin() + 6000);
    std::vector<std::string> owned(lines.begin() + 6000, lines.end());
    write_lines(path("target.txt"), target);
    write_lines(path("owned.txt"), owned);
    write_lines(path("all.txt"), lines);
    std::vector<std::string> acct;
    const auto store = testing::synthetic_accounts(400, 5);
    for (const auto& [email, pws] : store.accounts())
      for (const auto& pw : pws) acct.push_back(email + ":" + pw);
    write_lines(path("accounts.txt"), acct);
    write_lines(path("block.txt"), std::vector<std::string>(owned.begin(), owned.begin() + 200));
    write_lines(path("names.txt"), {"alice", "maria", "john"});
    auto r = tool({"--seed", "4", "train", "--in", path("target.txt"), "--out",
                   path("m.psm"), "--order", "3"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
  }
  static void TearDownTestSuite() { dir_.reset(); }

  static std::string path(const std::string& name) { return (*dir_ / name).string(); }
  static ToolResult tool(const std::vector<std::string>& args) {
    return run_tool(kTool, args, dir_->path());
  }
  static ordered_json report(const std::string& name) {
    return ordered_json::parse(read_file(path(name)));
  }

  static std::unique_ptr<testing::TempDir> dir_;
};

std::unique_ptr<testing::TempDir> Cli::dir_;

// TOML config equivalent to an echoed "config" object. Global options sit at
// the top level, the rest in the subcommand's table.
std::string config_toml(const ordered_json& config, const std::string& command) {
  auto value = [](const ordered_json& v) {
    if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
    if (v.is_array()) {
      std::string s = "[";
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].dump();
      return s + "]";
    }
    return v.dump();
  };
  std::ostringstream top, sub;
  for (const auto& [k, v] : config.items()) {
    if (v.is_null()) continue;
    const bool global = k == "seed" || k == "threads" || k == "csv";
    (global ? top : sub) << k << " = " << value(v) << "\n";
  }
  return top.str() + "[" + command + "]\n" + sub.str();
}

TEST_F(Cli, VersionAndHelpExitZero) {
  auto v = tool({"--version"});
  EXPECT_EQ(v.exit_code, 0);
  EXPECT_NE(v.out.find("psm-audit"), std::string::npos);
  EXPECT_EQ(tool({"train", "--help"}).exit_code, 0);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(tool({}).exit_code, 2);
  EXPECT_EQ(tool({"no-such-command"}).exit_code, 2);
  EXPECT_EQ(tool({"train", "--in", path("target.txt")}).exit_code, 2);
  EXPECT_EQ(tool({"train", "--in", path("target.txt"), "--out", "x", "--order", "three"})
                .exit_code,
            2);
  EXPECT_EQ(tool({"enumerate", "--model", path("m.psm"), "--g", "0"}).exit_code, 2);
}

TEST_F(Cli, RuntimeErrorsExitOne) {
  auto missing = tool({"train", "--in", path("nope.txt"), "--out", path("x.psm")});
  EXPECT_EQ(missing.exit_code, 1);
  EXPECT_NE(missing.err.find("nope.txt"), std::string::npos);

  write_lines(path("bad.psm"), {"not a model"});
  EXPECT_EQ(tool({"prob", "--model", path("bad.psm"), "--password", "x"}).exit_code, 1);
  EXPECT_EQ(tool({"train", "--in", path("target.txt"), "--out", path("y.psm"), "--order",
                  "12"})
                .exit_code,
            1);
  EXPECT_EQ(tool({"mia-attack", "--target", path("m.psm"), "--queries", path("all.txt")})
                .exit_code,
            1);
}

TEST_F(Cli, FitgCsvHasOneRowPerG) {
  auto r = tool({"--csv", "fitg", "--model", path("m.psm"), "--train", path("target.txt"),
                 "--g", "10,100"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::istringstream in(r.out);
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "G,fit");
  EXPECT_EQ(rows[1].rfind("10,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("100,", 0), 0u);
}

TEST_F(Cli, CalibrateThenAttack) {
  auto cal = tool({"--seed", "2", "--report", path("cal.json"), "mia-calibrate",
                   "--shadow-corpus", path("owned.txt"), "--order", "3"});
  ASSERT_EQ(cal.exit_code, 0) << cal.err;
  auto delta = report("cal.json")["result"]["attack"]["delta"].get<double>();
  EXPECT_GT(delta, 0.0);

  auto atk = tool({"--report", path("atk.json"), "mia-attack", "--target", path("m.psm"),
                   "--queries", path("all.txt"), "--truth", path("target.txt"),
                   "--delta-from", path("cal.json")});
  ASSERT_EQ(atk.exit_code, 0) << atk.err;
  auto r = report("atk.json")["result"];
  EXPECT_EQ(r["method"]["delta"].get<double>(), delta);
  EXPECT_GT(r["predicted_members"].get<int>(), 0);
  EXPECT_GT(r["report"]["tp"].get<int>(), 0);
  EXPECT_GT(r["report"]["tn"].get<int>() + r["report"]["fn"].get<int>(), 0);

  auto untruthed = tool({"mia-attack", "--target", path("m.psm"), "--queries", path("all.txt"),
                         "--delta-from", path("cal.json")});
  ASSERT_EQ(untruthed.exit_code, 0) << untruthed.err;
  auto j = ordered_json::parse(untruthed.out);
  EXPECT_TRUE(j["result"]["report"].is_null());
  EXPECT_EQ(j["result"]["predicted_members"], r["predicted_members"]);
}

TEST_F(Cli, EchoedConfigReproducesRun) {
  auto first = tool({"--seed", "9", "--report", path("t1.json"), "train", "--in",
                     path("target.txt"), "--out", path("t1.psm"), "--kind", "adaptive",
                     "--gamma", "0.001"});
  ASSERT_EQ(first.exit_code, 0) << first.err;
  auto echoed = report("t1.json");
  EXPECT_EQ(echoed["config"]["seed"], "9");
  EXPECT_EQ(echoed["config"]["kind"], "adaptive");

  auto cfg = echoed["config"];
  cfg["out"] = path("t2.psm");
  write_lines(path("t.toml"), {config_toml(cfg, "train")});
  auto second = tool({"--config", path("t.toml"), "--report", path("t2.json"), "train"});
  ASSERT_EQ(second.exit_code, 0) << second.err;
  auto again = report("t2.json");
  EXPECT_EQ(again["result"], echoed["result"]);
  EXPECT_EQ(read_file(path("t1.psm")), read_file(path("t2.psm")));
}

TEST_F(Cli, ReportsAreByteIdenticalWithSidecar) {
  for (const char* name : {"s1.json", "s2.json"}) {
    auto r = tool({"--seed", "1", "--report", path(name), "strength", "--model", path("m.psm"),
                   "--samples", "2000", "--password", "kalo12", "--password", "zzzzzzzz"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
  }
  EXPECT_EQ(read_file(path("s1.json")), read_file(path("s2.json")));
  auto meta = ordered_json::parse(read_file(path("s1.json.meta.json")));
  EXPECT_EQ(meta["command"], "strength");
  EXPECT_TRUE(meta.contains("generated_at"));
  EXPECT_TRUE(meta.contains("elapsed_seconds"));
  EXPECT_EQ(read_file(path("s1.json")).find("generated_at"), std::string::npos);
}

TEST_F(Cli, ThreadCountDoesNotChangeReports) {
  std::string out[2];
  for (int i = 0; i < 2; ++i) {
    auto r = tool({"--threads", i == 0 ? "1" : "4", "mia-attack", "--target", path("m.psm"),
                   "--queries", path("all.txt"), "--truth", path("target.txt"), "--salem-k",
                   "20"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    auto j = ordered_json::parse(r.out);
    out[i] = j["result"].dump();
  }
  EXPECT_EQ(out[0], out[1]);
}

TEST_F(Cli, StealWritesPlaintextOnlyWhenAsked) {
  auto quiet = tool({"steal", "--target", path("m.psm"), "--truth", path("target.txt"),
                     "--owned", path("owned.txt"), "--delta", "1e-6", "--budget", "500",
                     "--target-precision", "0.5"});
  ASSERT_EQ(quiet.exit_code, 0) << quiet.err;
  auto j = ordered_json::parse(quiet.out);
  EXPECT_FALSE(j["result"]["campaign"].contains("stolen_passwords"));
  EXPECT_FALSE(std::filesystem::exists(path("stolen.txt")));

  auto loud = tool({"steal", "--target", path("m.psm"), "--truth", path("target.txt"),
                    "--owned", path("owned.txt"), "--delta", "1e-6", "--budget", "500",
                    "--target-precision", "0.5", "--emit-plaintext", path("stolen.txt")});
  ASSERT_EQ(loud.exit_code, 0) << loud.err;
  std::istringstream in(read_file(path("stolen.txt")));
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  EXPECT_EQ(n, ordered_json::parse(loud.out)["result"]["campaign"]["stolen"].get<std::size_t>());
}

TEST_F(Cli, GuessingCommands) {
  auto sim = tool({"--csv", "simulate", "--accounts", path("accounts.txt"), "--used",
                   path("block.txt"), "--n-users", "100", "--caps", "5,10"});
  ASSERT_EQ(sim.exit_code, 0) << sim.err;
  EXPECT_EQ(sim.out.rfind("condition,cap,hits,rate\nfiltered,5,", 0), 0u);

  auto pat = tool({"patterns", "--in", path("block.txt"), "--names", path("names.txt")});
  ASSERT_EQ(pat.exit_code, 0) << pat.err;
  EXPECT_EQ(ordered_json::parse(pat.out)["result"]["total"].get<int>() > 0, true);

  auto ov = tool({"overlap", "--a", path("target.txt"), "--b", path("owned.txt"), "--k", "20",
                  "--a-by-frequency", "--b-by-frequency"});
  ASSERT_EQ(ov.exit_code, 0) << ov.err;
  const double ratio = ordered_json::parse(ov.out)["result"]["ratio"].get<double>();
  EXPECT_GT(ratio, 0.5);
}

TEST_F(Cli, EnumerateAndUpperBound) {
  auto e = tool({"--csv", "enumerate", "--model", path("m.psm"), "--g", "5"});
  ASSERT_EQ(e.exit_code, 0) << e.err;
  EXPECT_EQ(e.out.rfind("rank,password,prob\n1,", 0), 0u);
  auto ub = tool({"upper-bound", "--model", path("m.psm"), "--train", path("target.txt"),
                  "--g", "10,100"});
  ASSERT_EQ(ub.exit_code, 0) << ub.err;
  auto pts = ordered_json::parse(ub.out)["result"]["points"];
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0]["G"], 10);
}

}  // namespace
}  // namespace psmaudit
