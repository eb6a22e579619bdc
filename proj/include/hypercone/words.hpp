#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypercone/config.hpp"
#include "hypercone/ifs_core.hpp"

namespace hypercone {

/// Number of nodes sum_{k=1..depth} alphabet^k, saturating at UINT64_MAX.
std::uint64_t word_tree_size(std::size_t alphabet, int depth);

/// Throws a Budget error when a depth-`depth` traversal exceeds the cap.
void require_budget(std::size_t alphabet, int depth, const Budget& budget,
                    const std::string& what);

/// Depth-first traversal of the word tree in lexicographic order.  `visit`
/// is called for every word of length 1..max_len with the product
/// A_{w1} ... A_{wk} in scaled form.  Each child product is one 2x2
/// multiplication away from its parent.
template <class Visit>
void for_each_word(const IfsSystem& system, int max_len, const Budget& budget,
                   Visit&& visit) {
  if (max_len <= 0) return;
  require_budget(system.size(), max_len, budget, "word enumeration");
  std::vector<ScaledMat2> letters;
  letters.reserve(system.size());
  for (const auto& m : system.matrices()) letters.push_back(ScaledMat2::from(m));

  Word word;
  word.reserve(static_cast<std::size_t>(max_len));
  std::vector<ScaledMat2> stack;
  stack.reserve(static_cast<std::size_t>(max_len) + 1);
  stack.push_back(ScaledMat2{});

  auto recurse = [&](auto&& self) -> void {
    for (std::size_t i = 0; i < letters.size(); ++i) {
      word.push_back(i);
      stack.push_back(stack.back() * letters[i]);
      visit(static_cast<const Word&>(word), static_cast<const ScaledMat2&>(stack.back()));
      if (static_cast<int>(word.size()) < max_len) self(self);
      stack.pop_back();
      word.pop_back();
    }
  };
  recurse(recurse);
}

/// Same traversal restricted to words of exactly length n.
template <class Visit>
void for_each_word_of_length(const IfsSystem& system, int n, const Budget& budget,
                             Visit&& visit) {
  for_each_word(system, n, budget, [&](const Word& w, const ScaledMat2& p) {
    if (static_cast<int>(w.size()) == n) visit(w, p);
  });
}

/// All words of length n over {0, ..., alphabet-1} in lexicographic order.
std::vector<Word> all_words(std::size_t alphabet, int n);

}  // namespace hypercone
