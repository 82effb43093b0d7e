#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "psmaudit/error.hpp"
#include "psmaudit/targeted.hpp"
#include "synthetic.hpp"

namespace psmaudit {
namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

std::string letters(std::size_t i) {
  std::string s;
  do {
    s += static_cast<char>('a' + i % 26);
    i /= 26;
  } while (i > 0);
  return s;
}

std::string leet(std::string s) {
  for (auto& c : s) {
    switch (c) {
      case 'a': c = '@'; break;
      case 'e': c = '3'; break;
      case 'i': c = '1'; break;
      case 'o': c = '0'; break;
      case 's': c = '$'; break;
      case 't': c = '7'; break;
      default: break;
    }
  }
  return s;
}

TEST(LearnRules, AppendPairFavoursDigitOne) {
  auto gen = learn_rules({{"abc", "abc1"}});
  EXPECT_EQ(gen.weight(RuleKind::DigitAppend), 1u);
  EXPECT_EQ(gen.ranked_rules().front().rule, RuleKind::DigitAppend);
  EXPECT_EQ(gen.unexplained_pairs(), 0u);
  auto v = gen.variants("xyz");
  ASSERT_GE(v.size(), 2u);
  EXPECT_EQ(v[0], "xyz1");
  EXPECT_EQ(v[1], "xyz2");
}

TEST(LearnRules, CapitalizationPair) {
  auto gen = learn_rules({{"pass", "Pass"}});
  EXPECT_EQ(gen.weight(RuleKind::CaseToggle), 1u);
  EXPECT_EQ(gen.ranked_rules().front().rule, RuleKind::CaseToggle);
  auto v = gen.variants("word");
  EXPECT_EQ(v[0], "Word");
}

TEST(LearnRules, WeightsFollowPairCounts) {
  Pairs pairs;
  for (std::size_t i = 0; i < 70; ++i) {
    const std::string w = "pass" + letters(i);
    pairs.emplace_back(w, w + "7");
  }
  for (std::size_t i = 0; i < 30; ++i) {
    const std::string w = "seat" + letters(i + 100);
    pairs.emplace_back(w, leet(w));
  }
  auto gen = learn_rules(pairs);
  EXPECT_EQ(gen.weight(RuleKind::DigitAppend), 70u);
  EXPECT_EQ(gen.weight(RuleKind::Leet), 30u);
  EXPECT_EQ(gen.training_pairs(), 100u);
  const auto& ranked = gen.ranked_rules();
  auto pos = [&](RuleKind k) {
    return std::find_if(ranked.begin(), ranked.end(),
                        [&](const RuleWeight& w) { return w.rule == k; }) - ranked.begin();
  };
  EXPECT_LT(pos(RuleKind::DigitAppend), pos(RuleKind::Leet));
  // '7' was the only appended digit, so it is tried first.
  auto appended = gen.apply(RuleKind::DigitAppend, "x");
  EXPECT_EQ(appended.front(), "x7");
}

TEST(LearnRules, ReusePairsRankIdentityFirst) {
  auto gen = learn_rules({{"same1", "same1"}, {"abc", "abc1"}, {"q", "q"}});
  EXPECT_EQ(gen.ranked_rules().front().rule, RuleKind::Identity);
  EXPECT_EQ(gen.variants("leak")[0], "leak");
}

TEST(LearnRules, UnexplainedCounted) {
  auto gen = learn_rules({{"abc", "zzzzzz"}, {"abc", "abc1"}});
  EXPECT_EQ(gen.unexplained_pairs(), 1u);
}

TEST(LearnRules, EmptyIsError) {
  EXPECT_THROW(learn_rules({}), ArgumentError);
}

TEST(Rules, ApplyHandCases) {
  TargetedGenerator gen;
  EXPECT_EQ(gen.apply(RuleKind::DigitIncrement, "abc19"), (std::vector<std::string>{"abc20"}));
  EXPECT_EQ(gen.apply(RuleKind::DigitIncrement, "abc99"), (std::vector<std::string>{"abc100"}));
  EXPECT_TRUE(gen.apply(RuleKind::DigitIncrement, "abc").empty());
  EXPECT_EQ(gen.apply(RuleKind::DigitDelete, "abc12"), (std::vector<std::string>{"abc1", "abc"}));
  EXPECT_TRUE(gen.apply(RuleKind::DigitDelete, "123").empty());
  EXPECT_EQ(gen.apply(RuleKind::Leet, "p@ss"), (std::vector<std::string>{"p@$$", "pass"}));
  EXPECT_EQ(gen.apply(RuleKind::Identity, "x"), (std::vector<std::string>{"x"}));
}

TEST(Variants, UniqueAndLimited) {
  auto accounts = testing::synthetic_accounts(500, 3);
  auto gen = learn_rules(training_pairs(accounts));
  for (const auto& [email, pws] : accounts.accounts()) {
    const auto& leak = *pws.begin();
    auto v = gen.variants(leak);
    ASSERT_FALSE(v.empty());
    EXPECT_LE(v.size(), gen.candidate_limit());
    std::set<std::string> s(v.begin(), v.end());
    EXPECT_EQ(s.size(), v.size());
  }
  gen.set_candidate_limit(5);
  EXPECT_EQ(gen.variants("password").size(), 5u);
}

TEST(TrainingPairs, FirstTwoSortedBothDirections) {
  AccountStore a;
  a.add("u@x", "c");
  a.add("u@x", "a");
  a.add("u@x", "b");
  a.add("solo@x", "z");
  auto pairs = training_pairs(a);
  EXPECT_EQ(pairs, (Pairs{{"a", "b"}, {"b", "a"}}));
}

TEST(Simulate, HandTrace) {
  // Default rules give abc, Abc, ABC, @bc, abc1, ... for the leak "abc".
  TargetedGenerator gen;
  AccountStore accounts;
  accounts.add("u@x", "abc");
  accounts.add("u@x", "abc1");
  UsedSet used({"abc", "Abc", "ABC", "@bc"});
  SimulationConfig cfg;
  cfg.n_users = 1;
  cfg.caps = {1, 5};
  auto rep = simulate(accounts, gen, used, cfg);
  ASSERT_EQ(rep.outcomes.size(), 1u);
  EXPECT_EQ(rep.outcomes[0].unfiltered_rank, 5u);
  EXPECT_EQ(rep.outcomes[0].filtered_rank, 1u);
  EXPECT_EQ(rep.outcomes[0].skipped_before_hit, 4u);
  EXPECT_EQ(rep.caps[0].filtered_hits, 1u);
  EXPECT_EQ(rep.caps[0].unfiltered_hits, 0u);
  EXPECT_EQ(rep.caps[1].unfiltered_hits, 1u);
  EXPECT_EQ(rep.earlier_guessed_fraction, 1.0);
  EXPECT_EQ(rep.mean_reduced_guesses, 4.0);
  EXPECT_FALSE(rep.insufficient_users);
  EXPECT_EQ(simulation_csv(rep),
            "condition,cap,hits,rate\nfiltered,1,1,1\nfiltered,5,1,1\n"
            "unfiltered,1,0,0\nunfiltered,5,1,1\n");
}

TEST(Simulate, InsufficientUsersFlagged) {
  TargetedGenerator gen;
  AccountStore accounts;
  accounts.add("u@x", "abc");
  accounts.add("u@x", "abc1");
  accounts.add("solo@x", "abc");
  SimulationConfig cfg;
  cfg.n_users = 10;
  auto rep = simulate(accounts, gen, UsedSet{}, cfg);
  EXPECT_TRUE(rep.insufficient_users);
  EXPECT_EQ(rep.evaluated_users, 1u);
}

TEST(Simulate, WeakTargetsExcluded) {
  auto accounts = testing::synthetic_accounts(50, 4);
  SimulationConfig cfg;
  cfg.n_users = 50;
  auto rep = simulate(accounts, TargetedGenerator{}, UsedSet{}, cfg,
                      [](const std::string&) { return 10.0; });
  EXPECT_EQ(rep.eligible_users, 0u);
  EXPECT_EQ(rep.earlier_guessed_fraction, 0.0);
}

struct SimFixture {
  AccountStore accounts = testing::synthetic_accounts(3000, 21);
  TargetedGenerator gen = learn_rules(training_pairs(accounts));
  UsedSet used;
  SimFixture() {
    std::vector<std::string> u;
    std::size_t i = 0;
    for (const auto& [email, pws] : accounts.accounts())
      for (const auto& pw : pws)
        if (i++ % 3 == 0) u.push_back(pw);
    used = UsedSet(u);
  }
};

TEST(Simulate, MonotoneAndConserving) {
  SimFixture f;
  SimulationConfig cfg;
  cfg.n_users = 2000;
  cfg.caps = {1, 5, 10, 100};
  cfg.seed = 3;
  auto rep = simulate(f.accounts, f.gen, f.used, cfg);
  ASSERT_EQ(rep.caps.size(), 4u);
  for (std::size_t i = 0; i < rep.caps.size(); ++i) {
    EXPECT_GE(rep.caps[i].filtered_rate, rep.caps[i].unfiltered_rate);
    if (i > 0) {
      EXPECT_GE(rep.caps[i].filtered_rate, rep.caps[i - 1].filtered_rate);
      EXPECT_GE(rep.caps[i].unfiltered_rate, rep.caps[i - 1].unfiltered_rate);
    }
  }
  std::uint64_t hits = 0, earlier = 0;
  for (const auto& o : rep.outcomes) {
    if (o.unfiltered_rank == 0) {
      EXPECT_EQ(o.filtered_rank, 0u);
      continue;
    }
    EXPECT_EQ(o.filtered_rank + o.skipped_before_hit, o.unfiltered_rank);
    EXPECT_GE(o.filtered_rank, 1u);
    if (o.filtered_rank <= rep.horizon) {
      ++hits;
      earlier += o.filtered_rank < o.unfiltered_rank;
    }
  }
  EXPECT_EQ(earlier, rep.earlier_guessed);
  ASSERT_GT(hits, 0u);
  EXPECT_DOUBLE_EQ(rep.earlier_guessed_fraction,
                   static_cast<double>(earlier) / static_cast<double>(hits));
}

TEST(Simulate, DeterministicAcrossThreads) {
  SimFixture f;
  SimulationConfig cfg;
  cfg.n_users = 1000;
  cfg.seed = 8;
  auto a = simulate(f.accounts, f.gen, f.used, cfg);
  cfg.threads = 4;
  auto b = simulate(f.accounts, f.gen, f.used, cfg);
  EXPECT_EQ(simulation_csv(a), simulation_csv(b));
  ASSERT_EQ(a.outcomes.size(), b.outcomes.size());
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    EXPECT_EQ(a.outcomes[i].unfiltered_rank, b.outcomes[i].unfiltered_rank);
    EXPECT_EQ(a.outcomes[i].filtered_rank, b.outcomes[i].filtered_rank);
  }
  cfg.seed = 9;
  auto c = simulate(f.accounts, f.gen, f.used, cfg);
  EXPECT_EQ(c.evaluated_users, a.evaluated_users);
}

TEST(Simulate, InvalidConfig) {
  AccountStore accounts;
  accounts.add("u@x", "a1");
  accounts.add("u@x", "a2");
  TargetedGenerator gen;
  SimulationConfig cfg;
  cfg.n_users = 0;
  EXPECT_THROW(simulate(accounts, gen, UsedSet{}, cfg), ArgumentError);
  cfg.n_users = 1;
  cfg.caps = {};
  EXPECT_THROW(simulate(accounts, gen, UsedSet{}, cfg), ArgumentError);
  cfg.caps = {10, 5};
  EXPECT_THROW(simulate(accounts, gen, UsedSet{}, cfg), ArgumentError);
}

}  // namespace
}  // namespace psmaudit
