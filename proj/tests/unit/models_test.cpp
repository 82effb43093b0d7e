#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracle.hpp"
#include "psmaudit/bpe.hpp"
#include "psmaudit/error.hpp"
#include "psmaudit/model.hpp"
#include "psmaudit/rng.hpp"
#include "synthetic.hpp"

namespace psmaudit {
namespace {

using testing::brute_force_ranking;
using testing::compare_with_enumeration;
using testing::universe;

ModelParams params(int order, double smoothing) {
  ModelParams p;
  p.order = order;
  p.smoothing = smoothing;
  return p;
}

PasswordCorpus tiny_six_char_corpus() {
  return PasswordCorpus::from_counts(
      {{"ab1", 4}, {"ab", 3}, {"c!", 2}, {"a12", 2}, {"b", 1}, {"12", 3}, {"abc", 1},
       {"ca", 1}, {"!", 1}, {"2b!", 1}});
}

TEST(ListModel, RelativeFrequency) {
  auto m = train(ModelKind::List, PasswordCorpus::from_counts({{"abc", 2}, {"abd", 2}}), {});
  EXPECT_DOUBLE_EQ(m->prob("abc"), 0.5);
  EXPECT_EQ(m->prob("zzz"), 0.0);
  EXPECT_EQ(m->prob(""), 0.0);
}

TEST(ListModel, EnumeratesByFrequency) {
  auto m = train(ModelKind::List, PasswordCorpus::from_counts({{"a", 3}, {"b", 1}}), {});
  auto top = enumerate_top(*m, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].rank, 1u);
  EXPECT_EQ(top[0].password, "a");
  EXPECT_DOUBLE_EQ(top[0].prob, 0.75);
  EXPECT_EQ(top[1].password, "b");
  EXPECT_DOUBLE_EQ(top[1].prob, 0.25);
  EXPECT_EQ(enumerate_top(*m, 10).size(), 2u);
}

TEST(ListModel, TiesAreLexicographic) {
  auto m = train(ModelKind::List,
                 PasswordCorpus::from_counts({{"zeta", 1}, {"alpha", 1}, {"mid", 1}}), {});
  auto top = enumerate_top(*m, 3);
  EXPECT_EQ(top[0].password, "alpha");
  EXPECT_EQ(top[1].password, "mid");
  EXPECT_EQ(top[2].password, "zeta");
}

TEST(NGram, UnsmoothedHandCount) {
  auto m = train(ModelKind::NGram, PasswordCorpus::from_counts({{"ab", 1}}), params(2, 0.0));
  EXPECT_EQ(m->prob("ab"), 1.0);
  EXPECT_EQ(m->prob("ba"), 0.0);
  EXPECT_EQ(m->token_probs("ab"), (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(NGram, LaplaceHandSmoothing) {
  auto m = train(ModelKind::NGram, PasswordCorpus::from_counts({{"ab", 1}}), params(2, 1.0));
  EXPECT_DOUBLE_EQ(m->prob("ab"), 0.125);
  EXPECT_DOUBLE_EQ(m->prob("b"), (1.0 / 4) * (2.0 / 4));  // start->b unseen, b->end seen
}

TEST(NGram, UnseenCharacterIsZero) {
  auto m = train(ModelKind::NGram, PasswordCorpus::from_counts({{"ab", 1}}), params(2, 1.0));
  EXPECT_EQ(m->prob("abz"), 0.0);
  EXPECT_TRUE(m->token_probs("abz").empty());
}

TEST(NGram, EmptyStringIsReported) {
  auto m = train(ModelKind::NGram, PasswordCorpus::from_counts({{"ab", 1}}), params(2, 1.0));
  const double p = m->prob("");
  EXPECT_GE(p, 0.0);
  EXPECT_LE(p, 1.0);
  EXPECT_DOUBLE_EQ(p, 1.0 / 4);  // start -> end
}

TEST(NGram, TwoGramMatchesBruteForceUpToThree) {
  auto corpus = PasswordCorpus::from_counts({{"ab", 3}, {"a", 1}, {"bba", 2}, {"b", 1}});
  auto m = train(ModelKind::NGram, corpus, params(2, 0.5));
  auto want = brute_force_ranking(*m, universe("ab", 3));
  EXPECT_EQ(want.size(), 14u);
  EXPECT_EQ(compare_with_enumeration(*m, want, 3), "");
}

TEST(NGram, ConditionalsSumToOne) {
  auto corpus = tiny_six_char_corpus();
  for (int order : {2, 3, 4}) {
    auto m = train(ModelKind::NGram, corpus, params(order, 0.01));
    for (std::string prefix : {"", "a", "ab", "12", "c!a", "bbbb"}) {
      double sum = m->token_probs(prefix).back();
      for (char c : std::string("ab12c!"))
        sum += m->token_probs(prefix + c)[prefix.size()];
      EXPECT_NEAR(sum, 1.0, 1e-12) << "order " << order << " prefix " << prefix;
    }
  }
}

TEST(NGram, NormalizationOverBoundedLength) {
  auto corpus = PasswordCorpus::from_counts({{"ab", 3}, {"a", 2}, {"ba", 1}, {"b", 2}});
  auto m = train(ModelKind::NGram, corpus, params(2, 0.01));
  double sum = m->prob("");
  for (const auto& s : universe("ab", 12)) sum += m->prob(s);
  EXPECT_NEAR(sum, 1.0, 1e-3);
  EXPECT_LE(sum, 1.0 + 1e-12);
}

TEST(NGram, TrainingIsDeterministic) {
  auto corpus = testing::zipf_corpus(4000, 600, 1.0, 21);
  auto a = train(ModelKind::NGram, corpus, params(4, 0.01));
  auto b = train(ModelKind::NGram, corpus, params(4, 0.01));
  EXPECT_EQ(serialize_model(*a), serialize_model(*b));
}

TEST(NGram, EnumerationIsNonIncreasingAndUnique) {
  auto corpus = testing::zipf_corpus(4000, 600, 1.0, 22);
  auto m = train(ModelKind::NGram, corpus, params(3, 0.01));
  auto top = enumerate_top(*m, 3000);
  ASSERT_EQ(top.size(), 3000u);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < top.size(); ++i) {
    EXPECT_TRUE(seen.insert(top[i].password).second);
    EXPECT_EQ(top[i].prob, m->prob(top[i].password));
    if (i > 0) {
      EXPECT_LE(top[i].prob, top[i - 1].prob);
      if (top[i].prob == top[i - 1].prob) {
        EXPECT_LT(top[i - 1].password, top[i].password);
      }
    }
  }
}

TEST(AdaptiveNGram, ZeroGammaMatchesPlain) {
  auto corpus = testing::zipf_corpus(3000, 500, 1.0, 23);
  ModelParams p = params(4, 0.01);
  p.gamma = 0.0;
  auto plain = train(ModelKind::NGram, corpus, p);
  auto adaptive = train(ModelKind::AdaptiveNGram, corpus, p);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto& e = corpus.entries()[rng.below(corpus.unique_size())];
    EXPECT_EQ(plain->prob(e.password), adaptive->prob(e.password));
  }
  EXPECT_EQ(plain->prob("zzqq"), adaptive->prob("zzqq"));
}

TEST(AdaptiveNGram, NoiseIsSeededAndChangesCounts) {
  auto corpus = testing::zipf_corpus(3000, 500, 1.0, 24);
  ModelParams p = params(4, 0.01);
  p.gamma = 0.2;
  p.seed = 5;
  auto a = train(ModelKind::AdaptiveNGram, corpus, p);
  auto b = train(ModelKind::AdaptiveNGram, corpus, p);
  EXPECT_EQ(serialize_model(*a), serialize_model(*b));
  p.gamma = 0.0;
  auto plain = train(ModelKind::AdaptiveNGram, corpus, p);
  int differ = 0;
  for (const auto& e : corpus.entries()) differ += a->prob(e.password) != plain->prob(e.password);
  EXPECT_GT(differ, 0);
}

TEST(Backoff, ConditionalsSumToOne) {
  auto corpus = testing::zipf_corpus(3000, 400, 1.0, 25);
  ModelParams p = params(5, 0.01);
  p.backoff_threshold = 10;
  auto m = train(ModelKind::Backoff, corpus, p);
  std::string alphabet;
  for (int c = 0x20; c < 0x7f; ++c)
    if (m->prob(std::string(1, static_cast<char>(c))) > 0.0) alphabet.push_back(static_cast<char>(c));
  ASSERT_FALSE(alphabet.empty());
  for (std::size_t i = 0; i < 20; ++i) {
    const std::string prefix = corpus.entries()[i * 7].password.substr(0, 3);
    double sum = m->token_probs(prefix).back();
    for (char c : alphabet) sum += m->token_probs(prefix + c)[prefix.size()];
    EXPECT_NEAR(sum, 1.0, 1e-9) << prefix;
  }
}

TEST(Backoff, HighThresholdFallsBackToUnigram) {
  auto corpus = PasswordCorpus::from_counts({{"ab", 1}, {"ba", 1}});
  ModelParams p = params(3, 1.0);
  p.backoff_threshold = 1000;
  auto m = train(ModelKind::Backoff, corpus, p);
  // Every context backs off to the empty one: a:2, b:2, end:2 over 6 events.
  const double each = (2.0 + 1.0) / (6.0 + 3.0);
  EXPECT_NEAR(m->prob("ab"), each * each * each, 1e-15);
  EXPECT_NEAR(m->prob("aa"), each * each * each, 1e-15);
}

TEST(Pcfg, SingleTemplateHandCount) {
  auto m = train(ModelKind::Pcfg, PasswordCorpus::from_counts({{"abc1", 1}}), {});
  EXPECT_EQ(m->prob("abc1"), 1.0);
  EXPECT_EQ(m->prob("abd1"), 0.0);
  auto top = enumerate_top(*m, 5);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0].password, "abc1");
}

TEST(Pcfg, TemplateTimesTerminals) {
  auto corpus = PasswordCorpus::from_counts({{"ab12", 1}, {"cd34", 1}, {"ab", 2}});
  auto m = train(ModelKind::Pcfg, corpus, {});
  // L2D2 has probability 1/2, L2 -> ab is 3/4, D2 -> 12 is 1/2.
  EXPECT_DOUBLE_EQ(m->prob("ab34"), 0.5 * 0.75 * 0.5);
  EXPECT_DOUBLE_EQ(m->prob("ab"), 0.5 * 0.75);
  auto t = m->token_probs("cd12");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_DOUBLE_EQ(t[0], 0.5);
}

TEST(Pcfg, ClosedGrammarSumsToOne) {
  auto m = train(ModelKind::Pcfg, tiny_six_char_corpus(), {});
  auto all = m->enumerate(30).take(100000);
  double sum = 0.0;
  for (const auto& c : all) sum += c.prob;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(ChunkPcfg, ProbsFactorIntoTemplateAndChunks) {
  auto corpus = tiny_six_char_corpus();
  ModelParams p;
  p.vocab_size = 9;
  p.min_merge_count = 1;
  auto m = train(ModelKind::ChunkPcfg, corpus, p);
  for (const auto& e : corpus.entries()) {
    auto t = m->token_probs(e.password);
    ASSERT_FALSE(t.empty()) << e.password;
    double prod = 1.0;
    for (double f : t) prod *= f;
    EXPECT_EQ(prod, m->prob(e.password));
  }
}

TEST(ChunkPcfg, CanonicalSupportSumsToOne) {
  ModelParams p;
  p.vocab_size = 9;
  p.min_merge_count = 1;
  auto m = train(ModelKind::ChunkPcfg, tiny_six_char_corpus(), p);
  double sum = 0.0;
  for (const auto& c : m->enumerate(30).take(100000)) sum += c.prob;
  EXPECT_GT(sum, 0.0);
  EXPECT_LE(sum, 1.0 + 1e-12);
}

class EnumerationSoundness : public ::testing::TestWithParam<ModelKind> {};

TEST_P(EnumerationSoundness, MatchesBruteForceOnSixCharUniverse) {
  ModelParams p = params(2, 0.05);
  p.backoff_threshold = 3;
  p.gamma = 0.05;
  p.vocab_size = 9;
  p.min_merge_count = 1;
  if (GetParam() == ModelKind::Backoff) p.order = 3;
  auto m = train(GetParam(), tiny_six_char_corpus(), p);
  auto want = brute_force_ranking(*m, universe("ab12c!", 3));
  ASSERT_FALSE(want.empty());
  EXPECT_EQ(compare_with_enumeration(*m, want, 3), "");
}

INSTANTIATE_TEST_SUITE_P(AllKinds, EnumerationSoundness,
                         ::testing::Values(ModelKind::List, ModelKind::NGram,
                                           ModelKind::Backoff, ModelKind::AdaptiveNGram,
                                           ModelKind::Pcfg, ModelKind::ChunkPcfg),
                         [](const auto& info) {
                           std::string s(to_string(info.param));
                           std::erase_if(s, [](char c) { return !std::isalnum(c); });
                           return s;
                         });

TEST(Train, RejectsBadInput) {
  auto corpus = PasswordCorpus::from_counts({{"ab", 1}});
  EXPECT_THROW(train(ModelKind::NGram, PasswordCorpus{}, {}), EmptyInputError);
  EXPECT_THROW(train(ModelKind::NGram, corpus, params(1, 0.01)), ArgumentError);
  EXPECT_THROW(train(ModelKind::NGram, corpus, params(9, 0.01)), ArgumentError);
  ModelParams g;
  g.gamma = 1.5;
  EXPECT_THROW(train(ModelKind::AdaptiveNGram, corpus, g), ArgumentError);
  ModelParams v;
  v.vocab_size = 1;
  EXPECT_THROW(train(ModelKind::ChunkPcfg, corpus, v), ArgumentError);
  EXPECT_THROW(train(ModelKind::NGram, corpus, params(2, -1.0)), ArgumentError);
}

TEST(ModelKind, NamesRoundTrip) {
  for (auto k : {ModelKind::List, ModelKind::NGram, ModelKind::Backoff,
                 ModelKind::AdaptiveNGram, ModelKind::Pcfg, ModelKind::ChunkPcfg})
    EXPECT_EQ(parse_model_kind(to_string(k)), k);
  EXPECT_EQ(parse_model_kind("chunk-pcfg"), ModelKind::ChunkPcfg);
  EXPECT_EQ(parse_model_kind("adaptive"), ModelKind::AdaptiveNGram);
  EXPECT_THROW(parse_model_kind("lstm"), ArgumentError);
}

class RoundTrip : public ::testing::TestWithParam<ModelKind> {};

TEST_P(RoundTrip, ProbabilitiesSurvive) {
  auto corpus = testing::zipf_corpus(3000, 500, 1.0, 26);
  ModelParams p = params(4, 0.01);
  p.vocab_size = 200;
  auto m = train(GetParam(), corpus, p);
  auto bytes = serialize_model(*m);
  auto back = deserialize_model(bytes);
  EXPECT_EQ(back->kind(), m->kind());
  EXPECT_EQ(back->info().params, m->info().params);
  EXPECT_EQ(back->info().corpus_fingerprint, corpus.fingerprint());
  EXPECT_EQ(serialize_model(*back), bytes);
  Rng rng(4);
  auto vocab = testing::synthetic_vocabulary(300, 77);
  for (int i = 0; i < 100; ++i) {
    const auto& pw = i % 2 ? corpus.entries()[rng.below(corpus.unique_size())].password
                           : vocab[rng.below(vocab.size())];
    EXPECT_EQ(m->prob(pw), back->prob(pw)) << pw;
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, RoundTrip,
                         ::testing::Values(ModelKind::List, ModelKind::NGram,
                                           ModelKind::Backoff, ModelKind::AdaptiveNGram,
                                           ModelKind::Pcfg, ModelKind::ChunkPcfg),
                         [](const auto& info) {
                           std::string s(to_string(info.param));
                           std::erase_if(s, [](char c) { return !std::isalnum(c); });
                           return s;
                         });

TEST(Serialize, FileRoundTrip) {
  testing::TempDir dir("model");
  auto m = train(ModelKind::List, PasswordCorpus::from_counts({{"a", 3}, {"b", 1}}), {});
  save_model(*m, dir / "m.bin");
  auto back = load_model(dir / "m.bin");
  EXPECT_DOUBLE_EQ(back->prob("a"), 0.75);
  EXPECT_THROW(load_model(dir / "missing.bin"), IoError);
}

TEST(Serialize, CorruptionIsDecodeError) {
  auto m = train(ModelKind::NGram, testing::zipf_corpus(500, 100, 1.0, 27), params(3, 0.01));
  const std::string bytes = serialize_model(*m);
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{12}, bytes.size() / 2,
                          bytes.size() - 1})
    EXPECT_THROW(deserialize_model(std::string_view(bytes).substr(0, cut)), DecodeError) << cut;

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_model(bad_magic), DecodeError);

  std::string bad_version = bytes;
  bad_version[8] = static_cast<char>(kModelFormatVersion + 1);
  EXPECT_THROW(deserialize_model(bad_version), DecodeError);

  std::string flipped = bytes;
  flipped[bytes.size() - 20] ^= 0x5a;
  EXPECT_THROW(deserialize_model(flipped), DecodeError);

  EXPECT_THROW(deserialize_model(bytes + "x"), DecodeError);
}

TEST(Bpe, FirstMergeOnRepeatedPair) {
  auto corpus = PasswordCorpus::from_counts({{"aaaa", 10}});
  auto table = bpe_learn(corpus, 2);
  ASSERT_EQ(table.merges().size(), 1u);
  EXPECT_EQ(table.merges()[0], (std::pair<std::string, std::string>{"a", "a"}));
  EXPECT_EQ(table.segment("aaaa"), (std::vector<std::string>{"aa", "aa"}));
}

TEST(Bpe, AlphabetSizedVocabularyKeepsCharacters) {
  auto corpus = PasswordCorpus::from_counts({{"abca", 3}, {"bb", 1}});
  auto table = bpe_learn(corpus, 3);
  EXPECT_TRUE(table.merges().empty());
  EXPECT_EQ(table.segment("abc"), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Bpe, VocabularyBelowAlphabetIsError) {
  auto corpus = PasswordCorpus::from_counts({{"abc", 1}});
  EXPECT_THROW(bpe_learn(corpus, 2), ArgumentError);
}

TEST(Bpe, SegmentationReconstructs) {
  auto corpus = testing::zipf_corpus(5000, 800, 1.0, 28);
  auto table = bpe_learn(corpus, 300);
  EXPECT_LE(table.vocab_size(), 300u);
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    std::string pw;
    const auto len = 1 + rng.below(20);
    for (std::uint64_t j = 0; j < len; ++j) pw.push_back(static_cast<char>(0x20 + rng.below(95)));
    auto chunks = table.segment(pw);
    std::string joined;
    for (const auto& c : chunks) joined += c;
    EXPECT_EQ(joined, pw);
    EXPECT_EQ(chunks, table.segment(pw));
  }
}

TEST(Bpe, TiesGoToSmallestPair) {
  auto corpus = PasswordCorpus::from_counts({{"ab", 1}, {"cd", 1}});
  auto table = bpe_learn(corpus, 5);
  ASSERT_EQ(table.merges().size(), 1u);
  EXPECT_EQ(table.merges()[0].first, "a");
}

}  // namespace
}  // namespace psmaudit
