#include "psmaudit/report.hpp"

#include <fstream>
#include <iterator>

#include <json.hpp>

#include "psmaudit/error.hpp"

namespace psmaudit {

namespace {

using ojson = nlohmann::ordered_json;

std::string dump(const ojson& j) { return j.dump(2); }

ojson attack_json(const AttackReport& r) {
  ojson j;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["tn"] = r.tn;
  j["fn"] = r.fn;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["precision_undefined"] = r.precision_undefined;
  j["recall_undefined"] = r.recall_undefined;
  return j;
}

}  // namespace

std::string to_json(const AttackReport& r) { return dump(attack_json(r)); }

std::string to_json(const ThresholdAttack& a) {
  ojson j;
  j["delta"] = a.delta;
  j["expected_member_ratio"] = a.expected_member_ratio;
  j["prefix_length"] = a.prefix_length;
  j["achieved_ratio"] = a.achieved_ratio;
  j["qualified"] = a.qualified;
  j["shadow_fingerprint"] = a.shadow_fingerprint;
  return dump(j);
}

ThresholdAttack threshold_attack_from_json(const std::string& json) {
  try {
    auto j = ojson::parse(json);
    // Accepts a bare attack object or a mia-calibrate report around one.
    const ojson& body = j.contains("result") ? j.at("result") : j;
    const ojson& a = body.contains("attack") ? body.at("attack") : body;
    ThresholdAttack t;
    t.delta = a.at("delta").get<double>();
    t.expected_member_ratio = a.value("expected_member_ratio", 0.8);
    t.prefix_length = a.value("prefix_length", std::size_t{0});
    t.achieved_ratio = a.value("achieved_ratio", 0.0);
    t.qualified = a.value("qualified", true);
    t.shadow_fingerprint = a.value("shadow_fingerprint", std::uint64_t{0});
    if (!(t.delta >= 0.0 && t.delta <= 1.0))
      throw ArgumentError("calibration delta outside [0, 1]");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("bad calibration file: ") + e.what());
  }
}

std::string to_json(const StealReport& r, bool include_passwords) {
  ojson j;
  j["queries_issued"] = r.queries_issued;
  j["predicted_members"] = r.predicted_members;
  j["true_members"] = r.true_members;
  j["raw_precision"] = r.raw_precision;
  j["final_threshold"] = r.final_threshold;
  j["retained"] = r.retained;
  j["stolen"] = r.stolen;
  j["achieved_precision"] = r.achieved_precision;
  j["target_precision"] = r.target_precision;
  j["generator_exhausted"] = r.generator_exhausted;
  j["precision_unreachable"] = r.precision_unreachable;
  if (include_passwords) j["stolen_passwords"] = r.stolen_passwords;
  return dump(j);
}

std::string to_json(const FitReport& r) {
  ojson pts = ojson::array();
  for (const auto& p : r.points) {
    ojson e;
    e["G"] = p.g;
    e["fit"] = p.fit;
    e["members"] = p.members;
    e["emitted"] = p.emitted;
    e["exhausted"] = p.exhausted;
    pts.push_back(std::move(e));
  }
  ojson j;
  j["points"] = std::move(pts);
  return dump(j);
}

std::string to_json(const SimulationReport& r, bool include_outcomes) {
  ojson j;
  j["requested_users"] = r.requested_users;
  j["evaluated_users"] = r.evaluated_users;
  j["eligible_users"] = r.eligible_users;
  j["insufficient_users"] = r.insufficient_users;
  j["horizon"] = r.horizon;
  ojson caps = ojson::array();
  for (const auto& c : r.caps) {
    ojson e;
    e["cap"] = c.cap;
    e["filtered_rate"] = c.filtered_rate;
    e["unfiltered_rate"] = c.unfiltered_rate;
    e["filtered_hits"] = c.filtered_hits;
    e["unfiltered_hits"] = c.unfiltered_hits;
    caps.push_back(std::move(e));
  }
  j["caps"] = std::move(caps);
  j["earlier_guessed"] = r.earlier_guessed;
  j["earlier_guessed_fraction"] = r.earlier_guessed_fraction;
  j["mean_reduced_guesses"] = r.mean_reduced_guesses;
  if (include_outcomes) {
    ojson outs = ojson::array();
    for (const auto& o : r.outcomes)
      outs.push_back({o.user_index, o.unfiltered_rank, o.filtered_rank,
                      o.skipped_before_hit});
    j["outcome_columns"] = {"user", "unfiltered_rank", "filtered_rank", "skipped"};
    j["outcomes"] = std::move(outs);
  }
  return dump(j);
}

std::string to_json(const PatternStats& s) {
  ojson j;
  j["total"] = s.total;
  j["names"] = s.names;
  j["dates"] = s.dates;
  j["phones"] = s.phones;
  j["name_pct"] = s.name_pct;
  j["date_pct"] = s.date_pct;
  j["phone_pct"] = s.phone_pct;
  return dump(j);
}

std::string to_json(const OverlapResult& r) {
  ojson j;
  j["k"] = r.k;
  j["intersection"] = r.intersection;
  j["ratio"] = r.ratio;
  j["truncated"] = r.truncated;
  return dump(j);
}

std::string to_json(const std::vector<UpperBoundPoint>& points) {
  ojson arr = ojson::array();
  for (const auto& p : points) {
    ojson e;
    e["G"] = p.g;
    e["fraction"] = p.fraction;
    e["members"] = p.members;
    e["emitted"] = p.emitted;
    e["exhausted"] = p.exhausted;
    arr.push_back(std::move(e));
  }
  ojson j;
  j["points"] = std::move(arr);
  return dump(j);
}

std::string to_json(const std::vector<FrequencyBucket>& buckets) {
  ojson arr = ojson::array();
  for (const auto& b : buckets) {
    ojson e;
    e["interval"] = b.interval.label();
    e["stolen"] = b.stolen;
    if (b.share)
      e["share"] = *b.share;
    else
      e["share"] = nullptr;
    arr.push_back(std::move(e));
  }
  ojson j;
  j["buckets"] = std::move(arr);
  return dump(j);
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace psmaudit
