#include "common.hpp"

namespace psm_cli {

namespace {

// Flag name -> effective value as text, for the options of one app.
void echo_options(const CLI::App& app, ojson& out) {
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config" || name == "report" ||
        name == "version")
      continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_items_expected_max() == 0) {
        out[name] = true;
      } else if (res.size() == 1) {
        out[name] = res.front();
      } else {
        out[name] = res;
      }
    } else if (opt->get_items_expected_max() == 0) {
      out[name] = false;
    } else if (opt->get_default_str().empty()) {
      out[name] = nullptr;
    } else {
      out[name] = opt->get_default_str();
    }
  }
}

}  // namespace

std::string envelope(const CLI::App& sub, const ojson& result) {
  ojson config;
  if (sub.get_parent()) echo_options(*sub.get_parent(), config);
  echo_options(sub, config);
  ojson j;
  j["tool"] = psmaudit::toolkit_version();
  j["command"] = sub.get_name();
  j["config"] = std::move(config);
  j["result"] = result;
  return j.dump(2) + "\n";
}

ojson parse_json(const std::string& text) { return ojson::parse(text); }

void add_model_options(CLI::App* sub, psmaudit::ModelParams& p, std::string& kind) {
  sub->add_option("--kind", kind,
                  "list, ngram, backoff, adaptive, pcfg, chunk-pcfg")
      ->capture_default_str();
  sub->add_option("--order", p.order, "n-gram order (2..8)")->capture_default_str();
  sub->add_option("--smoothing", p.smoothing, "additive smoothing constant")
      ->capture_default_str();
  sub->add_option("--gamma", p.gamma, "adaptive noise rate")->capture_default_str();
  sub->add_option("--backoff-threshold", p.backoff_threshold,
                  "minimum context count for backoff")
      ->capture_default_str();
  sub->add_option("--vocab-size", p.vocab_size, "BPE vocabulary size")
      ->capture_default_str();
  sub->add_option("--min-merge-count", p.min_merge_count,
                  "BPE stops below this pair count")
      ->capture_default_str();
  sub->add_option("--max-length", p.max_length, "longest password kept / enumerated")
      ->capture_default_str();
}

psmaudit::PasswordCorpus load_corpus_arg(const std::string& path,
                                         std::size_t max_len) {
  return psmaudit::load_corpus(path, max_len);
}

}  // namespace psm_cli
