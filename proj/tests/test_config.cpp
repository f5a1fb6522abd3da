#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <numbers>
#include <string>

#include "ghzcav/config.hpp"
#include "ghzcav/error.hpp"
#include "ghzcav/experiment.hpp"

using namespace ghzcav;

namespace {

const char* kMinimal = R"({
  "device": {
    "qubit1": {"g_hz": 2.2e8, "f10_hz": 2.5e9, "f21_hz": 3e9},
    "spectators": [
      {"g_hz": 4.4e7, "f10_hz": 2e9, "f21_hz": 2.4e9, "cavity_detuning_ratio": 10}
    ],
    "cavity": {"freq_hz": 3e9, "quality": "inf"}
  },
  "seed": 7
})";

std::string expect_config_error(const std::string& text) {
  try {
    parse_config(text, "t.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ConfigError for: " << text;
  return {};
}

}  // namespace

TEST(Config, MinimalDefaults) {
  auto c = parse_config(kMinimal);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.mode, "closed-form");
  EXPECT_TRUE(std::isinf(c.cavity.quality));
  EXPECT_EQ(c.cavity.n_max, 2);
  EXPECT_FALSE(c.protocol.jc_during_pulses);
  EXPECT_DOUBLE_EQ(c.protocol.rabi_r_over_g, 10.0);
}

TEST(Config, UnitsAndDeviceModel) {
  auto c = parse_config(kMinimal);
  auto u = units_of(c);
  EXPECT_NEAR(u.g_rad_per_s, 2.0 * std::numbers::pi * 2.2e8, 1e-3);
  // t_1b = pi / (2 g) for g/2pi = 220 MHz is 1.136 ns.
  const double t1b = u.seconds(std::numbers::pi / 2.0);
  EXPECT_NEAR(t1b, 1.0 / (4.0 * 2.2e8), 1e-12 * t1b);
  EXPECT_NEAR(t1b * 1e9, 1.136, 5e-4);
  auto m = device_model(c);
  EXPECT_DOUBLE_EQ(m.first.g, 1.0);
  EXPECT_NEAR(m.spectators[0].g, 0.2, 1e-15);
  EXPECT_NEAR(m.cavity_detuning(0) / m.spectators[0].g, 10.0, 1e-12);
  EXPECT_EQ(m.cavity.kappa(), 0.0);
}

TEST(Config, RoundTrip) {
  auto c = parse_config(kMinimal);
  const std::string once = dump_json(to_json(c));
  const std::string twice = dump_json(to_json(parse_config(once)));
  EXPECT_EQ(once, twice);
  EXPECT_NE(once.find("\"quality\": \"inf\""), std::string::npos);
}

TEST(Config, FieldErrorsCarryPointers) {
  std::string text = kMinimal;
  auto bad_key = text;
  bad_key.replace(bad_key.find("\"seed\""), 6, "\"sed\"");
  EXPECT_NE(expect_config_error(bad_key).find("t.json: /sed: unknown key"), std::string::npos)
      << expect_config_error(bad_key);

  auto bad_type = text;
  bad_type.replace(bad_type.find("2.2e8"), 5, "\"x\"");
  EXPECT_NE(expect_config_error(bad_type).find("/device/qubit1/g_hz"), std::string::npos);

  auto both = text;
  both.replace(both.find("\"cavity_detuning_ratio\": 10"), 27, "\"cavity_detuning_ratio\": 10, \"f32_hz\": 1e9");
  EXPECT_NE(expect_config_error(both).find("/device/spectators/0"), std::string::npos);

  auto detuned = text;
  detuned.replace(detuned.find("\"f21_hz\": 3e9"), 13, "\"f21_hz\": 3.1e9");
  EXPECT_NE(expect_config_error(detuned).find("f21_hz"), std::string::npos);
}

TEST(Config, SyntaxErrorHasLineAndColumn) {
  const std::string msg = expect_config_error("{\n  \"seed\": 1,\n  oops\n}");
  EXPECT_NE(msg.find("t.json:3:"), std::string::npos) << msg;
}

TEST(Config, ApplyAxisWildcard) {
  Json doc = Json::parse(R"({"a": [{"r": 1}, {"r": 2}], "b": {"n": 3}})");
  apply_axis(doc, "/a/*/r,/b/n", 20);
  EXPECT_EQ(doc["a"][0]["r"], 20);
  EXPECT_EQ(doc["a"][1]["r"], 20);
  EXPECT_TRUE(doc["b"]["n"].is_number_integer());
  EXPECT_THROW(apply_axis(doc, "/a/*/missing", 1.0), ConfigError);
  EXPECT_THROW(apply_axis(doc, "a/r", 1.0), ConfigError);
}

TEST(Config, DumpIsDeterministic) {
  Json doc = Json::parse(R"({"x": 0.1, "y": [1, 2.5], "z": "s"})");
  EXPECT_EQ(dump_json(doc), dump_json(Json::parse(dump_json(doc))));
  EXPECT_NE(dump_json(doc).find("0.10000000000000001"), std::string::npos);
}

TEST(Experiment, SweepWithEmptyValuesHasHeaderOnly) {
  auto c = parse_config(kMinimal);
  c.sweep.axis = "/device/spectators/*/cavity_detuning_ratio";
  auto rows = run_sweep(c, Mode::ClosedForm);
  EXPECT_TRUE(rows.empty());
  const std::string csv = sweep_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST(Experiment, SweepRowsOrderedAndStatused) {
  auto c = parse_config(kMinimal);
  c.sweep.axis = "/device/spectators/*/cavity_detuning_ratio";
  c.sweep.values = {20, 5, 10};
  auto rows = run_sweep(c, Mode::ClosedForm);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].value, 5.0);
  EXPECT_EQ(rows[0].status, "infeasible");
  EXPECT_EQ(rows[1].status, "ok");
  EXPECT_NEAR(rows[1].f_numeric, 1.0, 1e-12);
  c.sweep.axis = "/device/nothing";
  EXPECT_THROW(run_sweep(c, Mode::ClosedForm), ConfigError);
}

TEST(Experiment, SimulationReportsAreByteIdentical) {
  auto c = parse_config(kMinimal);
  auto a = run_simulation(c, Mode::ClosedForm);
  auto b = run_simulation(c, Mode::ClosedForm);
  EXPECT_EQ(dump_json(simulation_document(c, a)), dump_json(simulation_document(c, b)));
  EXPECT_EQ(trace_csv(a), trace_csv(b));
  const std::string csv = trace_csv(a);
  EXPECT_EQ(csv.rfind("segment,time_s,observable,value\n", 0), 0u);

  // Times never decrease within a segment.
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::map<std::string, double> last;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const std::string seg = line.substr(0, c1);
    const double t = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    if (last.count(seg)) EXPECT_GE(t, last[seg]);
    last[seg] = t;
  }
}
