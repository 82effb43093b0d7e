#include <memory>
#include <sstream>

#include "common.hpp"

namespace psm_cli {

namespace {

using namespace psmaudit;

struct DeltaSource {
  std::string from;
  double value = -1.0;
};

void add_delta_options(CLI::App* sub, DeltaSource& d) {
  auto* from = sub->add_option("--delta-from", d.from, "calibration report from mia-calibrate");
  sub->add_option("--delta", d.value, "explicit probability threshold")->excludes(from);
}

std::optional<ThresholdAttack> resolve_delta(const DeltaSource& d) {
  if (!d.from.empty()) return threshold_attack_from_json(read_text_file(d.from));
  if (d.value >= 0.0) {
    ThresholdAttack a;
    a.delta = d.value;
    return a;
  }
  return std::nullopt;
}

void register_calibrate(CLI::App& app, Registry& reg) {
  struct Opts {
    std::string corpus, kind = "ngram", save_shadow;
    double ratio = 0.8;
    ModelParams params;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("mia-calibrate",
                                 "pick a membership threshold on a shadow model");
  sub->add_option("--shadow-corpus", o->corpus, "attacker-owned corpus")->required();
  sub->add_option("--ratio", o->ratio, "expected member ratio in (0.5, 1]")
      ->capture_default_str();
  sub->add_option("--save-shadow", o->save_shadow, "also write the shadow model");
  add_model_options(sub, o->params, o->kind);
  reg.commands.emplace_back(sub, [o, &reg](CLI::App& s) {
    ModelParams p = o->params;
    p.seed = reg.global.seed;
    auto owned = load_corpus(o->corpus, p.max_length);
    auto split = split_shadow(owned, reg.global.seed);
    auto shadow = train(parse_model_kind(o->kind), split.train_half, p);
    if (!o->save_shadow.empty()) save_model(*shadow, o->save_shadow);
    auto labeled = build_labeled(*shadow, split);
    auto attack = select_threshold(labeled, o->ratio);
    attack.shadow_fingerprint = model_fingerprint(*shadow);

    std::ostringstream sum;
    sum << "delta = " << attack.delta << " (prefix " << attack.prefix_length << "/"
        << labeled.size() << ", member ratio " << attack.achieved_ratio
        << (attack.qualified ? "" : ", no prefix qualified") << ")\n";
    if (reg.global.csv) return Output{labeled_csv(labeled), sum.str()};

    ojson r;
    r["split"] = {{"train_unique", split.train_half.unique_size()},
                  {"test_unique", split.test_half.unique_size()},
                  {"seed", split.seed}};
    r["shadow_model"] = parse_json(model_info_json(shadow->info()));
    r["attack"] = parse_json(to_json(attack));
    return Output{envelope(s, r), sum.str()};
  });
}

void register_attack(CLI::App& app, Registry& reg) {
  struct Opts {
    std::string target, queries, truth, scheme, shadow_corpus;
    DeltaSource delta;
    double salem_k = 0.0;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("mia-attack", "membership inference against a target model");
  sub->add_option("--target", o->target, "target model file")->required();
  sub->add_option("--queries", o->queries, "query corpus")->required();
  sub->add_option("--truth", o->truth, "target training corpus, for scoring");
  add_delta_options(sub, o->delta);
  sub->add_option("--salem-k", o->salem_k, "top-k% baseline instead of a threshold");
  sub->add_option("--classifier", o->scheme, "feature classifier: whole, internal, joint");
  sub->add_option("--shadow-corpus", o->shadow_corpus, "owned corpus to train the classifier");
  reg.commands.emplace_back(sub, [o, &reg](CLI::App& s) {
    auto target = load_model(o->target);
    const std::size_t max_len = target->info().params.max_length;
    auto queries = load_corpus(o->queries, max_len);
    const unsigned threads = resolve_threads(reg.global.threads);
    auto threshold = resolve_delta(o->delta);

    int methods = (threshold ? 1 : 0) + (o->salem_k > 0.0 ? 1 : 0) + (o->scheme.empty() ? 0 : 1);
    if (methods != 1)
      throw ArgumentError("choose exactly one of --delta-from/--delta, --salem-k, --classifier");

    ojson method;
    std::vector<Prediction> preds;
    if (threshold) {
      preds = attack_threshold(*target, queries, threshold->delta, threads);
      method = {{"name", "threshold"}, {"delta", threshold->delta}};
    } else if (o->salem_k > 0.0) {
      preds = attack_salem(*target, queries, o->salem_k, threads);
      method = {{"name", "salem"}, {"k_percent", o->salem_k}};
    } else {
      if (o->shadow_corpus.empty())
        throw ArgumentError("--classifier needs --shadow-corpus");
      const auto scheme = parse_feature_scheme(o->scheme);
      ModelParams p = target->info().params;
      p.seed = reg.global.seed;
      auto owned = load_corpus(o->shadow_corpus, max_len);
      auto split = split_shadow(owned, reg.global.seed);
      auto shadow = train(target->kind(), split.train_half, p);
      ClassifierOptions copt;
      copt.seed = reg.global.seed;
      auto clf = train_classifier(build_labeled(*shadow, split), scheme, copt);
      for (const auto& e : queries.entries()) {
        auto sample = label_query(*target, e.password);
        preds.push_back({e.password, sample.prob, clf.is_member(sample)});
      }
      method = {{"name", "classifier"},
                {"scheme", std::string(to_string(scheme))},
                {"training_accuracy", clf.training_accuracy()},
                {"weights", clf.weights()},
                {"bias", clf.bias()}};
    }

    std::uint64_t members = 0;
    for (const auto& p : preds) members += p.member ? 1 : 0;
    ojson r;
    r["method"] = method;
    r["queries"] = preds.size();
    r["predicted_members"] = members;
    std::ostringstream sum;
    sum << members << " of " << preds.size() << " queries predicted members\n";
    if (!o->truth.empty()) {
      auto truth = load_corpus(o->truth, max_len);
      auto rep = evaluate(preds, truth);
      r["report"] = parse_json(to_json(rep));
      sum << "precision " << rep.precision << ", recall " << rep.recall << ", F1 "
          << rep.f1 << "\n";
    } else {
      r["report"] = nullptr;
    }
    return Output{envelope(s, r), sum.str()};
  });
}

void register_steal(CLI::App& app, Registry& reg) {
  struct Opts {
    std::string target, truth, owned, generator = "mangler", plaintext;
    DeltaSource delta;
    std::size_t budget = 10000;
    double precision = 0.9;
    bool no_feedback = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("steal", "harvest training passwords at a fixed precision");
  sub->add_option("--target", o->target, "target model file")->required();
  sub->add_option("--truth", o->truth, "target training corpus, for scoring")->required();
  sub->add_option("--owned", o->owned, "attacker-owned corpus (replay list / seed pool)")->required();
  sub->add_option("--generator", o->generator, "replay or mangler")->capture_default_str();
  sub->add_option("--budget", o->budget, "queries to issue")->capture_default_str();
  sub->add_option("--target-precision", o->precision)->capture_default_str();
  sub->add_flag("--no-feedback", o->no_feedback, "do not feed predicted members back");
  sub->add_option("--emit-plaintext", o->plaintext,
                  "write the stolen passwords to this file (off by default)");
  add_delta_options(sub, o->delta);
  reg.commands.emplace_back(sub, [o](CLI::App& s) {
    auto target = load_model(o->target);
    const std::size_t max_len = target->info().params.max_length;
    auto attack = resolve_delta(o->delta);
    if (!attack) throw ArgumentError("steal needs --delta-from or --delta");
    auto truth = load_corpus(o->truth, max_len);
    auto owned = load_corpus(o->owned, max_len);

    std::unique_ptr<QueryGenerator> gen;
    if (o->generator == "replay")
      gen = std::make_unique<CorpusReplayGenerator>(owned);
    else if (o->generator == "mangler")
      gen = std::make_unique<ManglerGenerator>(owned, max_len);
    else
      throw ArgumentError("unknown generator: " + o->generator);

    CampaignOptions copt;
    copt.budget = o->budget;
    copt.target_precision = o->precision;
    copt.feedback = !o->no_feedback;
    auto rep = run_campaign(*target, truth, *gen, *attack, copt);
    auto buckets = frequency_breakdown(rep.stolen_passwords, truth,
                                       default_frequency_intervals());
    if (!o->plaintext.empty()) {
      std::string lines;
      for (const auto& pw : rep.stolen_passwords) lines += pw + "\n";
      write_text_file(o->plaintext, lines);
    }

    ojson r;
    r["generator"] = o->generator;
    r["delta"] = attack->delta;
    r["campaign"] = parse_json(to_json(rep));
    r["frequency"] = parse_json(to_json(buckets))["buckets"];
    std::ostringstream sum;
    sum << "stolen " << rep.stolen << " of " << rep.queries_issued << " queries at precision "
        << rep.achieved_precision;
    if (rep.precision_unreachable) sum << " (target precision unreachable)";
    sum << "\n";
    return Output{envelope(s, r), sum.str()};
  });
}

}  // namespace

void register_attack_commands(CLI::App& app, Registry& reg) {
  register_calibrate(app, reg);
  register_attack(app, reg);
  register_steal(app, reg);
}

}  // namespace psm_cli
