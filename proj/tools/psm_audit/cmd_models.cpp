#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "common.hpp"

namespace psm_cli {

namespace {

using namespace psmaudit;

std::vector<std::string> gather_passwords(const std::vector<std::string>& inline_pw,
                                          const std::string& file) {
  std::vector<std::string> out = inline_pw;
  if (!file.empty()) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) out.push_back(line);
    }
  }
  if (out.empty()) throw ArgumentError("no passwords given (use --password or --in)");
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ojson guess_json(double g) {
  if (std::isinf(g)) return nullptr;
  return g;
}

void register_train(CLI::App& app, Registry& reg) {
  struct Opts {
    std::string kind = "ngram", in, out;
    ModelParams params;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("train", "train a password model on a corpus");
  add_model_options(sub, o->params, o->kind);
  sub->add_option("--in", o->in, "training corpus, one password per line")->required();
  sub->add_option("--out", o->out, "model file to write")->required();
  reg.commands.emplace_back(sub, [o, &reg](CLI::App& s) {
    ModelParams p = o->params;
    p.seed = reg.global.seed;
    CorpusLoadStats stats;
    auto corpus = load_corpus(o->in, p.max_length, &stats);
    auto model = train(parse_model_kind(o->kind), corpus, p);
    save_model(*model, o->out);
    ojson meta = parse_json(model_info_json(model->info()));
    write_text_file(o->out + ".json", meta.dump(2) + "\n");

    ojson r;
    r["model"] = meta;
    r["input"] = {{"lines", stats.lines_read},
                  {"dropped", stats.dropped},
                  {"unique", corpus.unique_size()},
                  {"total", corpus.total()}};
    std::ostringstream sum;
    sum << "trained " << o->kind << " on " << corpus.total() << " passwords ("
        << corpus.unique_size() << " unique, " << stats.dropped
        << " lines dropped) -> " << o->out << "\n";
    return Output{envelope(s, r), sum.str()};
  });
}

void register_prob(CLI::App& app, Registry& reg) {
  struct Opts {
    std::string model, in;
    std::vector<std::string> passwords;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("prob", "query model probabilities");
  sub->add_option("--model", o->model)->required();
  sub->add_option("--password", o->passwords, "password to score (repeatable)");
  sub->add_option("--in", o->in, "file of passwords to score");
  reg.commands.emplace_back(sub, [o](CLI::App& s) {
    auto model = load_model(o->model);
    ojson rows = ojson::array();
    std::ostringstream sum;
    for (const auto& pw : gather_passwords(o->passwords, o->in)) {
      const double p = model->prob(pw);
      rows.push_back({{"password", pw}, {"prob", p}, {"tokens", model->token_probs(pw)}});
      sum << p << "\t" << pw << "\n";
    }
    ojson r;
    r["probabilities"] = std::move(rows);
    return Output{envelope(s, r), sum.str()};
  });
}

void register_enumerate(CLI::App& app, Registry& reg) {
  struct Opts {
    std::string model;
    std::size_t g = 0;
    std::size_t max_length = 0;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("enumerate", "top-G candidates in rank order");
  sub->add_option("--model", o->model)->required();
  sub->add_option("--g", o->g, "number of candidates")->required()->check(CLI::PositiveNumber);
  sub->add_option("--max-length", o->max_length, "longest candidate (default: model's)");
  reg.commands.emplace_back(sub, [o, &reg](CLI::App& s) {
    auto model = load_model(o->model);
    auto stream = model->enumerate(o->max_length ? o->max_length
                                                 : model->info().params.max_length);
    auto top = stream.take(o->g);
    if (reg.global.csv) {
      std::string csv = "rank,password,prob\n";
      for (const auto& c : top) {
        std::ostringstream line;
        line.precision(17);
        line << c.rank << ',' << csv_field(c.password) << ',' << c.prob << '\n';
        csv += line.str();
      }
      return Output{csv, std::to_string(top.size()) + " candidates\n"};
    }
    ojson cands = ojson::array();
    for (const auto& c : top) cands.push_back({c.rank, c.password, c.prob});
    ojson r;
    r["requested"] = o->g;
    r["emitted"] = top.size();
    r["exhausted"] = top.size() < o->g;
    r["max_tie_batch"] = stream.max_batch();
    r["candidates"] = std::move(cands);
    std::ostringstream sum;
    sum << top.size() << " candidates";
    if (top.size() < o->g) sum << " (support exhausted)";
    sum << "\n";
    return Output{envelope(s, r), sum.str()};
  });
}

void register_strength(CLI::App& app, Registry& reg) {
  struct Opts {
    std::string model, in, members;
    std::vector<std::string> passwords;
    std::size_t samples = 100000;
    StrengthThresholds thresholds;
    double guess_cap = kInfiniteGuessNumber;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("strength", "Monte Carlo guess numbers and ratings");
  sub->add_option("--model", o->model)->required();
  sub->add_option("--password", o->passwords, "password to rate (repeatable)");
  sub->add_option("--in", o->in, "file of passwords to rate");
  sub->add_option("--samples", o->samples, "estimator sample size")->capture_default_str();
  sub->add_option("--weak-below", o->thresholds.weak_below)->capture_default_str();
  sub->add_option("--strong-from", o->thresholds.strong_from)->capture_default_str();
  sub->add_option("--members", o->members,
                  "member corpus; adds the over-learning scatter (is_member flags)");
  sub->add_option("--guess-cap", o->guess_cap, "scatter rows above this are dropped");
  reg.commands.emplace_back(sub, [o, &reg](CLI::App& s) {
    auto model = load_model(o->model);
    auto est = build_estimator(*model, o->samples, reg.global.seed);
    auto probes = gather_passwords(o->passwords, o->in);

    std::optional<PasswordCorpus> members;
    if (!o->members.empty())
      members = load_corpus(o->members, model->info().params.max_length);
    if (reg.global.csv) {
      if (!members) throw ArgumentError("--csv for strength needs --members");
      auto rows = scatter_data(*model, est, *members, probes, o->guess_cap);
      return Output{scatter_csv(rows), std::to_string(rows.size()) + " scatter rows\n"};
    }

    ojson ratings = ojson::array();
    std::ostringstream sum;
    for (const auto& pw : probes) {
      const double p = model->prob(pw);
      auto rating = rate(est.guess_number(p), o->thresholds);
      ojson row;
      row["password"] = pw;
      row["prob"] = p;
      row["guess_number"] = guess_json(rating.guess_number);
      row["bucket"] = std::string(to_string(rating.bucket));
      if (members) row["is_member"] = members->contains(pw);
      ratings.push_back(std::move(row));
      sum << to_string(rating.bucket) << "\t" << rating.guess_number << "\t" << pw << "\n";
    }
    ojson r;
    r["estimator"] = {{"samples", est.sample_size()},
                      {"acceptance", est.acceptance()},
                      {"model_fingerprint", est.model_fingerprint()}};
    r["thresholds"] = {{"weak_below", o->thresholds.weak_below},
                       {"strong_from", o->thresholds.strong_from}};
    r["ratings"] = std::move(ratings);
    return Output{envelope(s, r), sum.str()};
  });
}

void register_fitg(CLI::App& app, Registry& reg) {
  struct Opts {
    std::string model, train;
    std::vector<std::uint64_t> g;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("fitg", "member fraction of the top-G candidates");
  sub->add_option("--model", o->model)->required();
  sub->add_option("--train", o->train, "the model's training corpus")->required();
  sub->add_option("--g", o->g, "comma-separated G values")->required()->delimiter(',');
  reg.commands.emplace_back(sub, [o, &reg](CLI::App& s) {
    auto model = load_model(o->model);
    auto train_corpus = load_corpus(o->train, model->info().params.max_length);
    auto rep = fit_g(*model, train_corpus, o->g);
    std::ostringstream sum;
    for (const auto& p : rep.points)
      sum << "Fit_" << p.g << " = " << p.fit << (p.exhausted ? " (exhausted)" : "") << "\n";
    if (reg.global.csv) return Output{fit_report_csv(rep), sum.str()};
    return Output{envelope(s, parse_json(to_json(rep))), sum.str()};
  });
}

void register_upper_bound(CLI::App& app, Registry& reg) {
  struct Opts {
    std::string model, train;
    std::vector<std::uint64_t> g;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("upper-bound", "best achievable stealing per guess budget");
  sub->add_option("--model", o->model)->required();
  sub->add_option("--train", o->train, "the model's training corpus")->required();
  sub->add_option("--g", o->g, "comma-separated G values")->required()->delimiter(',');
  reg.commands.emplace_back(sub, [o](CLI::App& s) {
    auto model = load_model(o->model);
    auto train_corpus = load_corpus(o->train, model->info().params.max_length);
    auto pts = upper_bound(*model, train_corpus, o->g);
    std::ostringstream sum;
    for (const auto& p : pts)
      sum << "G=" << p.g << " members=" << p.members << " fraction=" << p.fraction << "\n";
    return Output{envelope(s, parse_json(to_json(pts))), sum.str()};
  });
}

}  // namespace

void register_model_commands(CLI::App& app, Registry& reg) {
  register_train(app, reg);
  register_prob(app, reg);
  register_enumerate(app, reg);
  register_strength(app, reg);
  register_fitg(app, reg);
  register_upper_bound(app, reg);
}

}  // namespace psm_cli
