#pragma once

#include <string>
#include <vector>

#include "psmaudit/model.hpp"

namespace psmaudit::testing {

// Every string of length 1..max_len over the alphabet.
std::vector<std::string> universe(const std::string& alphabet, std::size_t max_len);

// Universe strings with non-zero probability, sorted by probability
// descending and then lexicographically.
std::vector<RawCandidate> brute_force_ranking(const PasswordModel& model,
                                              const std::vector<std::string>& strings);

// Compares the first g enumerated candidates with the brute-force ranking:
// identical sequences, and identical sets at every distinct-probability
// boundary. Returns an empty string on success, else a description.
std::string compare_with_enumeration(const PasswordModel& model,
                                     const std::vector<RawCandidate>& expected,
                                     std::size_t max_len);

}  // namespace psmaudit::testing
