#include <memory>
#include <sstream>

#include "common.hpp"

namespace psm_cli {

namespace {

using namespace psmaudit;

void register_simulate(CLI::App& app, Registry& reg) {
  struct Opts {
    std::string accounts, rules_accounts, used, meter_model;
    SimulationConfig cfg;
    std::size_t samples = 100000;
    std::size_t candidate_limit = 1000;
    bool outcomes = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("simulate", "meter-aware targeted guessing");
  sub->add_option("--accounts", o->accounts, "email:password lines to attack")->required();
  sub->add_option("--rules-accounts", o->rules_accounts,
                  "accounts to learn rules from (default: --accounts)");
  sub->add_option("--used", o->used, "passwords the meter knows (blocklist or stolen list)");
  sub->add_option("--meter-model", o->meter_model,
                  "model whose guess numbers exclude weak targets");
  sub->add_option("--samples", o->samples, "estimator sample size for --meter-model")
      ->capture_default_str();
  sub->add_option("--n-users", o->cfg.n_users)->capture_default_str();
  sub->add_option("--caps", o->cfg.caps, "comma-separated guess caps")
      ->delimiter(',')->capture_default_str();
  sub->add_option("--weak-threshold", o->cfg.weak_guess_threshold)->capture_default_str();
  sub->add_option("--candidate-limit", o->candidate_limit)->capture_default_str();
  sub->add_flag("--outcomes", o->outcomes, "include per-user outcomes");
  reg.commands.emplace_back(sub, [o, &reg](CLI::App& s) {
    auto accounts = load_accounts(o->accounts);
    auto rule_src = o->rules_accounts.empty() ? accounts : load_accounts(o->rules_accounts);
    auto gen = learn_rules(training_pairs(rule_src));
    gen.set_candidate_limit(o->candidate_limit);
    UsedSet used;
    if (!o->used.empty()) used = UsedSet(load_blocklist(o->used).passwords());

    GuessNumberFn strength;
    std::unique_ptr<PasswordModel> meter;
    std::shared_ptr<MonteCarloEstimator> est;
    if (!o->meter_model.empty()) {
      meter = load_model(o->meter_model);
      est = std::make_shared<MonteCarloEstimator>(
          build_estimator(*meter, o->samples, reg.global.seed));
      const PasswordModel* m = meter.get();
      strength = [m, est](const std::string& pw) { return est->guess_number(m->prob(pw)); };
    }

    SimulationConfig cfg = o->cfg;
    cfg.seed = reg.global.seed;
    cfg.threads = resolve_threads(reg.global.threads);
    auto rep = simulate(accounts, gen, used, cfg, strength);

    std::ostringstream sum;
    sum << rep.evaluated_users << " users";
    if (rep.insufficient_users) sum << " (fewer eligible than requested)";
    sum << "\n";
    for (const auto& c : rep.caps)
      sum << "cap " << c.cap << ": filtered " << c.filtered_rate << ", unfiltered "
          << c.unfiltered_rate << "\n";
    sum << "earlier guessed " << rep.earlier_guessed_fraction << ", reduced guesses "
        << rep.mean_reduced_guesses << "\n";
    if (reg.global.csv) return Output{simulation_csv(rep), sum.str()};

    ojson rules = ojson::array();
    for (const auto& rw : gen.ranked_rules())
      rules.push_back({{"rule", std::string(to_string(rw.rule))}, {"weight", rw.weight}});
    ojson r;
    r["rules"] = std::move(rules);
    r["rule_pairs"] = gen.training_pairs();
    r["unexplained_pairs"] = gen.unexplained_pairs();
    r["used_size"] = used.size();
    r["simulation"] = parse_json(to_json(rep, o->outcomes));
    return Output{envelope(s, r), sum.str()};
  });
}

void register_patterns(CLI::App& app, Registry& reg) {
  struct Opts {
    std::string in, names, date_corpus;
    DateOptions dates;
    bool no_phones = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("patterns", "names, dates and phone numbers in a list");
  sub->add_option("--in", o->in, "password list or blocklist")->required();
  sub->add_option("--names", o->names, "name dictionary");
  sub->add_option("--date-corpus", o->date_corpus,
                  "corpus whose digit-run counts gate ambiguous dates");
  sub->add_option("--date-threshold", o->dates.frequency_threshold)->capture_default_str();
  sub->add_option("--min-year", o->dates.min_year)->capture_default_str();
  sub->add_option("--max-year", o->dates.max_year)->capture_default_str();
  sub->add_flag("--no-phones", o->no_phones);
  reg.commands.emplace_back(sub, [o](CLI::App& s) {
    auto list = load_blocklist(o->in);
    std::optional<NameDictionary> names;
    if (!o->names.empty()) names = NameDictionary::load(o->names);
    std::optional<DigitRunFrequency> freq;
    if (!o->date_corpus.empty()) freq = DigitRunFrequency(load_corpus(o->date_corpus));
    Recognizers rec;
    rec.names = names ? &*names : nullptr;
    rec.date_frequencies = freq ? &*freq : nullptr;
    rec.date_options = o->dates;
    rec.phones = !o->no_phones;
    auto st = pattern_stats(list.passwords(), rec);
    std::ostringstream sum;
    sum << st.total << " passwords: names " << st.name_pct << "%, dates " << st.date_pct
        << "%, phones " << st.phone_pct << "%\n";
    return Output{envelope(s, parse_json(to_json(st))), sum.str()};
  });
}

void register_overlap(CLI::App& app, Registry& reg) {
  struct Opts {
    std::string a, b;
    std::size_t k = 10;
    bool a_freq = false, b_freq = false, truncate = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("overlap", "shared fraction of two top-k lists");
  sub->add_option("--a", o->a)->required();
  sub->add_option("--b", o->b)->required();
  sub->add_option("--k", o->k)->capture_default_str();
  sub->add_flag("--a-by-frequency", o->a_freq, "rank list a by corpus frequency");
  sub->add_flag("--b-by-frequency", o->b_freq, "rank list b by corpus frequency");
  sub->add_flag("--allow-truncation", o->truncate);
  reg.commands.emplace_back(sub, [o](CLI::App& s) {
    auto ranked = [](const std::string& path, bool by_freq) {
      if (!by_freq) return load_blocklist(path).passwords();
      std::vector<std::string> out;
      for (const auto& e : load_corpus(path).by_frequency()) out.push_back(e.password);
      return out;
    };
    auto res = overlap_ratio(ranked(o->a, o->a_freq), ranked(o->b, o->b_freq), o->k,
                             o->truncate);
    std::ostringstream sum;
    sum << res.intersection << " shared in the top " << res.k << " (" << res.ratio << ")"
        << (res.truncated ? ", truncated" : "") << "\n";
    return Output{envelope(s, parse_json(to_json(res))), sum.str()};
  });
}

}  // namespace

void register_guessing_commands(CLI::App& app, Registry& reg) {
  register_simulate(app, reg);
  register_patterns(app, reg);
  register_overlap(app, reg);
}

}  // namespace psm_cli
