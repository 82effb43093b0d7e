#include <gtest/gtest.h>

#include <json.hpp>

#include "psmaudit/error.hpp"
#include "psmaudit/report.hpp"
#include "synthetic.hpp"

namespace psmaudit {
namespace {

TEST(Report, ThresholdAttackRoundTrip) {
  ThresholdAttack a;
  a.delta = 1.25e-7;
  a.expected_member_ratio = 0.75;
  a.prefix_length = 42;
  a.achieved_ratio = 0.8095238095238095;
  a.qualified = false;
  a.shadow_fingerprint = 0xdeadbeefcafef00dull;
  auto b = threshold_attack_from_json(to_json(a));
  EXPECT_EQ(b.delta, a.delta);
  EXPECT_EQ(b.expected_member_ratio, a.expected_member_ratio);
  EXPECT_EQ(b.prefix_length, a.prefix_length);
  EXPECT_EQ(b.achieved_ratio, a.achieved_ratio);
  EXPECT_EQ(b.qualified, a.qualified);
  EXPECT_EQ(b.shadow_fingerprint, a.shadow_fingerprint);
}

TEST(Report, ThresholdAttackInsideEnvelope) {
  auto t = threshold_attack_from_json(R"({"result":{"attack":{"delta":0.5}}})");
  EXPECT_EQ(t.delta, 0.5);
  EXPECT_TRUE(t.qualified);
}

TEST(Report, BadCalibrationRejected) {
  EXPECT_THROW(threshold_attack_from_json("not json"), ArgumentError);
  EXPECT_THROW(threshold_attack_from_json(R"({"x":1})"), ArgumentError);
  EXPECT_THROW(threshold_attack_from_json(R"({"delta":2.0})"), ArgumentError);
}

TEST(Report, StealPasswordsOnlyOnRequest) {
  StealReport r;
  r.stolen = 1;
  r.stolen_passwords = {"hunter2"};
  EXPECT_EQ(to_json(r).find("hunter2"), std::string::npos);
  EXPECT_NE(to_json(r, true).find("hunter2"), std::string::npos);
}

TEST(Report, EmptyBucketShareIsNull) {
  std::vector<FrequencyBucket> b{{{0, 10}, 2, 1.0}, {{10, 0}, 0, std::nullopt}};
  auto j = nlohmann::json::parse(to_json(b));
  EXPECT_EQ(j["buckets"][0]["share"], 1.0);
  EXPECT_TRUE(j["buckets"][1]["share"].is_null());
  EXPECT_EQ(j["buckets"][1]["interval"], "(10,inf)");
}

TEST(Report, KeyOrderIsFixed) {
  AttackReport r;
  const auto s = to_json(r);
  EXPECT_LT(s.find("\"tp\""), s.find("\"fp\""));
  EXPECT_LT(s.find("\"fn\""), s.find("\"precision\""));
  EXPECT_EQ(s, to_json(r));
}

TEST(Report, TextFileRoundTrip) {
  testing::TempDir dir("report");
  write_text_file(dir / "r.json", "{}\n");
  EXPECT_EQ(read_text_file(dir / "r.json"), "{}\n");
  EXPECT_THROW(read_text_file(dir / "missing.json"), IoError);
  EXPECT_THROW(write_text_file(dir / "no" / "such" / "x.json", "{}"), IoError);
}

}  // namespace
}  // namespace psmaudit
