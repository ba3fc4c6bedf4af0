#pragma once

// The quasi-order on configurations: goal multiplicities and store-atom
// multiplicities are compared pointwise (identifiers ignored), built-in
// stores must be logically equivalent.

#include <map>
#include <string>

#include "chrc/engine.hpp"

namespace chrc {

namespace detail {

inline std::map<std::string, int> item_counts(const Goal& g) {
  std::map<std::string, int> m;
  for (const auto& i : g) {
    // tag keeps atoms and equations apart even if they print alike
    m[(std::holds_alternative<Atom>(i) ? "a:" : "e:") + to_string(i)]++;
  }
  return m;
}

inline std::map<std::string, int> atom_counts(const std::vector<IdentifiedAtom>& s) {
  std::map<std::string, int> m;
  for (const auto& a : s) m[to_string(a.atom)]++;
  return m;
}

inline bool dominated(const std::map<std::string, int>& small, const std::map<std::string, int>& big) {
  for (const auto& [k, n] : small) {
    auto it = big.find(k);
    if (it == big.end() || it->second < n) return false;
  }
  return true;
}

}  // namespace detail

inline bool leq(const Configuration& a, const Configuration& b) {
  return equivalent(a.builtin, b.builtin) &&
         detail::dominated(detail::item_counts(a.goal), detail::item_counts(b.goal)) &&
         detail::dominated(detail::atom_counts(a.store), detail::atom_counts(b.store));
}

}  // namespace chrc
