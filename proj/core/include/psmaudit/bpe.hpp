#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "psmaudit/corpus.hpp"

namespace psmaudit {

// Learned byte-pair merges in the order they were learned.
class MergeTable {
 public:
  MergeTable() = default;
  MergeTable(std::vector<char> alphabet,
             std::vector<std::pair<std::string, std::string>> merges);

  const std::vector<char>& alphabet() const { return alphabet_; }
  const std::vector<std::pair<std::string, std::string>>& merges() const {
    return merges_;
  }
  std::size_t vocab_size() const { return alphabet_.size() + merges_.size(); }

  // Applies merges in learned order. Concatenating the result reproduces the
  // input; characters outside the alphabet stay single chunks.
  std::vector<std::string> segment(std::string_view password) const;

 private:
  std::vector<char> alphabet_;
  std::vector<std::pair<std::string, std::string>> merges_;
  std::unordered_map<std::string, std::uint32_t> rank_;  // left '\0' right
};

// Greedy pair-merge training over the corpus (pair occurrences weighted by
// password counts) until the vocabulary reaches vocab_size or the most
// frequent pair occurs fewer than min_pair_count times. Ties go to the
// lexicographically smallest (left, right). Throws ArgumentError when
// vocab_size is below the corpus alphabet size.
MergeTable bpe_learn(const PasswordCorpus& corpus, std::size_t vocab_size,
                     std::uint64_t min_pair_count = 1);

}  // namespace psmaudit
