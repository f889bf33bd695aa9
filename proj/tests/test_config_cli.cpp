// Copyright 2026 The sqzsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sqz/config.hpp"
#include "sqz/scenarios.hpp"

using namespace sqz;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("sqzsim_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

struct CliResult {
  int status = -1;
  std::string out;
  std::string err;
};

CliResult sqzsim(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string(SQZSIM_EXE) + " " + args + " >" + (dir / "stdout.txt").string() + " 2>" +
                          (dir / "stderr.txt").string();
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

void expect_same_tree(const fs::path& a, const fs::path& b) {
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv" && e.path().extension() != ".txt") continue;
    if (e.path().filename().string().rfind("std", 0) == 0) continue;
    ++files;
    ASSERT_TRUE(fs::exists(b / e.path().filename())) << e.path();
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
  }
  EXPECT_GT(files, 1u);
}

}  // namespace

TEST(Config, DefaultsCarryNominalValues) {
  const ExperimentConfig c;
  EXPECT_EQ(c.homodyne.lo_power, 88e-6);
  EXPECT_EQ(c.opo_bandwidth, 27e6);
  EXPECT_EQ(c.aom_offset, 40e6);
  EXPECT_EQ(c.pump_demod_freq, 80e6);
  EXPECT_EQ(c.length_demod_freq, 153.8e6);
  EXPECT_EQ(c.opo.fsr, 3.8e9);
  EXPECT_EQ(c.polarization_offset, 1.4e9);
  const OpoParams p = resolve_opo(c);
  EXPECT_DOUBLE_EQ(p.gamma, 13.5e6);
  EXPECT_NEAR(parametric_gain(p), 4.0, 0.01);
  EXPECT_TRUE(check_config(c).empty());
}

TEST(Config, ParsesDottedKeys) {
  const ExperimentConfig c = parse_config(R"(
# comment
scenario = fig4
seed = 77
homodyne.visibility = 0.9
homodyne.classical_noise = true
opo.x = 0.25
carrier.lo_power = 1.76e-4
lock.kp = 0.7
plan.windows = 10:50:1:10, 50:200:2:10
michelson.window = 3000:3400:4:50
)");
  EXPECT_EQ(c.scenario, "fig4");
  EXPECT_EQ(c.seed, 77u);
  EXPECT_EQ(c.homodyne.visibility, 0.9);
  EXPECT_TRUE(c.homodyne.classical_noise);
  EXPECT_EQ(resolve_opo(c).x, 0.25);
  EXPECT_EQ(c.homodyne.lo_power, 1.76e-4);
  EXPECT_EQ(c.lock.loops[2].servo.kp, 0.7);
  ASSERT_TRUE(c.plan.has_value());
  ASSERT_EQ(c.plan->windows.size(), 2u);
  EXPECT_EQ(c.plan->windows[1], (SpectrumWindow{50.0, 200.0, 2.0, 10}));
  EXPECT_EQ(c.michelson.window, (SpectrumWindow{3000.0, 3400.0, 4.0, 50}));
}

TEST(Config, DocumentedDefaultFileMatchesBuiltInDefaults) {
  const ExperimentConfig d;
  const ExperimentConfig c = load_config(std::string(SQZ_SOURCE_DIR) + "/configs/default.conf");
  EXPECT_EQ(c.seed, d.seed);
  EXPECT_EQ(c.duration_scale, d.duration_scale);
  EXPECT_EQ(resolve_opo(c).x, resolve_opo(d).x);
  EXPECT_EQ(resolve_opo(c).gamma, resolve_opo(d).gamma);
  EXPECT_EQ(c.homodyne.lo_power, d.homodyne.lo_power);
  EXPECT_EQ(c.homodyne.visibility, d.homodyne.visibility);
  EXPECT_EQ(c.michelson.window, d.michelson.window);
  EXPECT_EQ(c.michelson.signal_depth, d.michelson.signal_depth);
  EXPECT_EQ(c.lock.lo_demod_phase, d.lock.lo_demod_phase);
  EXPECT_EQ(c.lock.loops[1].servo.ki, d.lock.loops[1].servo.ki);
  ASSERT_TRUE(c.plan.has_value());
  EXPECT_EQ(c.plan->windows, default_window_plan().windows);
  EXPECT_EQ(parse_config("seed = 9   # trailing comment\n").seed, 9u);
}

TEST(Config, SchemaErrorListsEveryOffendingField) {
  try {
    parse_config("seed = abc\nbogus.key = 1\nhomodyne.qe = 0.9\nnot a setting\n");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("seed"), std::string::npos);
    EXPECT_NE(m.find("bogus.key"), std::string::npos);
    EXPECT_NE(m.find("line 4"), std::string::npos);
    EXPECT_EQ(m.find("homodyne.qe"), std::string::npos);
  }
  try {
    parse_config("scenario = fig9\nopo.x = 1.5\nhomodyne.visibility = 2\nplan.windows = 10:50:1:1, 60:100:1:1\n");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("scenario"), std::string::npos);
    EXPECT_NE(m.find("opo"), std::string::npos);
    EXPECT_NE(m.find("homodyne"), std::string::npos);
    EXPECT_NE(m.find("plan"), std::string::npos);
  }
  EXPECT_THROW(load_config("/nonexistent/sqzsim.conf"), SchemaError);
}

TEST(Output, TraceCsvHasTwoLineHeader) {
  const fs::path d = scratch("csv");
  Trace t{"t", {10.0, 10.25}, {-4.1, -3.9}, {0.6, 0.6}};
  write_trace(t, d / "t.csv");
  std::istringstream in(slurp(d / "t.csv"));
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  EXPECT_EQ(l1, "# sqzsim trace schema_version=1");
  EXPECT_EQ(l2, "frequency_hz,power_rel_shot_db,statistical_sigma_db");
  EXPECT_EQ(l3, "10,-4.1,0.6");
}

TEST(Cli, Fig2RerunIsByteIdentical) {
  const fs::path a = scratch("fig2_a"), b = scratch("fig2_b");
  ASSERT_EQ(sqzsim("fig2 --seed 1 --out " + a.string(), a).status, 0);
  ASSERT_EQ(sqzsim("fig2 --seed 1 --out " + b.string(), b).status, 0);
  expect_same_tree(a, b);
  const std::string summary = slurp(a / "fig2_summary.txt");
  EXPECT_NE(summary.find("shot_ratio_c = "), std::string::npos);
  EXPECT_NE(summary.find("classical_ratio_d = "), std::string::npos);
  const fs::path c = scratch("fig2_c");
  ASSERT_EQ(sqzsim("fig2 --seed 2 --out " + c.string(), c).status, 0);
  EXPECT_NE(slurp(a / "fig2_squeezed_b.csv"), slurp(c / "fig2_squeezed_b.csv"));
}

TEST(Cli, Fig3AndLockDemoDeterministic) {
  for (const std::string sc : {"fig3", "fig4", "lock-demo"}) {
    const fs::path a = scratch(sc + "_a"), b = scratch(sc + "_b");
    sqzsim(sc + " --seed 5 --duration-scale 0.002 --out " + a.string(), a);
    sqzsim(sc + " --seed 5 --duration-scale 0.002 --out " + b.string(), b);
    expect_same_tree(a, b);
  }
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  const fs::path d = scratch("cfg");
  std::ofstream(d / "run.conf") << "seed = 3\noutput_dir = " << (d / "from_config").string() << "\nduration_scale = 0.5\n";
  const CliResult r = sqzsim("lock-demo --config " + (d / "run.conf").string() + " --duration-scale 0.001", d);
  ASSERT_EQ(r.status, 0) << r.err;
  const std::string s = slurp(d / "from_config" / "lock_demo_summary.txt");
  EXPECT_NE(s.find("hold_duration_s = 5.4\n"), std::string::npos) << s;
  EXPECT_TRUE(fs::exists(d / "from_config" / "lock_demo_trajectory.csv"));
}

TEST(Cli, ExitStatusReflectsChecks) {
  const fs::path d = scratch("exit");
  const CliResult ok = sqzsim("selftest --check --out " + d.string(), d);
  EXPECT_EQ(ok.status, 0);
  EXPECT_NE(ok.out.find("PASS"), std::string::npos);
  // a classical control 40 dB below shot noise is unresolvable, so fig2 fails
  std::ofstream(d / "bad.conf") << "homodyne.classical_noise_rel_shot_db = -40\n";
  const CliResult fail = sqzsim("fig2 --check --config " + (d / "bad.conf").string() + " --out " + d.string(), d);
  EXPECT_EQ(fail.status, 1);
  EXPECT_NE(fail.out.find("FAIL"), std::string::npos);
  const CliResult nocheck = sqzsim("fig2 --config " + (d / "bad.conf").string() + " --out " + d.string(), d);
  EXPECT_EQ(nocheck.status, 0);
}

TEST(Cli, SchemaAndAcquisitionErrors) {
  const fs::path d = scratch("errors");
  std::ofstream(d / "bad.conf") << "opo.x = 2\nhomodyne.qe = 0\nwhat.ever = 1\n";
  const CliResult bad = sqzsim("fig3 --config " + (d / "bad.conf").string() + " --out " + d.string(), d);
  EXPECT_EQ(bad.status, 2);
  EXPECT_NE(bad.err.find("what.ever"), std::string::npos);
  std::ofstream(d / "slow.conf") << "lock.timeout = 0.01\n";
  const CliResult slow = sqzsim("lock-demo --config " + (d / "slow.conf").string() + " --out " + d.string(), d);
  EXPECT_NE(slow.status, 0);
  EXPECT_NE(slow.err.find("acquisition failed"), std::string::npos);
  EXPECT_NE(sqzsim("nonsense", d).status, 0);
  EXPECT_NE(sqzsim("fig2 --duration-scale -1 --out " + d.string(), d).status, 0);
}
