#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "polyhom/hom.hpp"
#include "polyhom/poly.hpp"

namespace testutil {

using namespace polyhom;

/// Brute-force oracle, independent of the search machinery: tries every map
/// universe(instance) -> universe(tmpl) in lexicographic order (first element
/// most significant, values in target universe order) and returns the first
/// one that satisfies the homomorphism condition by definition.
inline std::optional<std::map<std::string, std::string>> brute_force_hom(
    const Structure& instance, const Structure& tmpl) {
  const auto& xs = instance.universe();
  const auto& ds = tmpl.universe();
  if (xs.empty()) return std::map<std::string, std::string>{};
  if (ds.empty()) return std::nullopt;
  std::vector<std::size_t> pick(xs.size(), 0);
  for (;;) {
    std::map<std::string, std::string> map;
    for (std::size_t i = 0; i < xs.size(); ++i) map[xs[i]] = ds[pick[i]];
    bool ok = true;
    for (const auto& [symbol, tuples] : instance.relations()) {
      const TupleSet& target = tmpl.relation(symbol);
      for (const Tuple& t : tuples) {
        Tuple image;
        image.reserve(t.size());
        for (const auto& e : t) image.push_back(map.at(e));
        if (!target.count(image)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return map;
    std::size_t i = xs.size();
    for (;;) {
      if (i == 0) return std::nullopt;
      --i;
      if (++pick[i] < ds.size()) break;
      pick[i] = 0;
    }
  }
}

/// Number of homomorphisms by brute force.
inline std::size_t brute_force_count(const Structure& instance, const Structure& tmpl) {
  const auto& xs = instance.universe();
  const auto& ds = tmpl.universe();
  if (xs.empty()) return 1;
  if (ds.empty()) return 0;
  std::size_t count = 0;
  std::vector<std::size_t> pick(xs.size(), 0);
  for (;;) {
    std::map<std::string, std::string> map;
    for (std::size_t i = 0; i < xs.size(); ++i) map[xs[i]] = ds[pick[i]];
    Homomorphism h{instance, tmpl, map};
    if (is_valid_hom(h)) ++count;
    std::size_t i = xs.size();
    bool done = false;
    for (;;) {
      if (i == 0) {
        done = true;
        break;
      }
      --i;
      if (++pick[i] < ds.size()) break;
      pick[i] = 0;
    }
    if (done) return count;
  }
}

/// Seeded random instance over the given signature: a universe of
/// `size` elements named e0..e<size-1>, each candidate tuple kept with
/// probability density_percent/100.  Deterministic for a fixed rng state.
inline Structure random_instance(std::mt19937_64& rng, const Signature& sig, int size,
                                 int density_percent) {
  std::vector<std::string> universe;
  universe.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) universe.push_back("e" + std::to_string(i));
  std::map<std::string, TupleSet> relations;
  for (const Symbol& symbol : sig.symbols()) {
    TupleSet tuples;
    std::vector<int> pick(static_cast<std::size_t>(symbol.arity), 0);
    for (;;) {
      if (static_cast<int>(rng() % 100) < density_percent) {
        Tuple t;
        t.reserve(pick.size());
        for (int j : pick) t.push_back(universe[static_cast<std::size_t>(j)]);
        tuples.insert(std::move(t));
      }
      std::size_t i = pick.size();
      bool done = false;
      for (;;) {
        if (i == 0) {
          done = true;
          break;
        }
        --i;
        if (++pick[i] < size) break;
        pick[i] = 0;
      }
      if (done) break;
    }
    relations[symbol.name] = std::move(tuples);
  }
  return Structure(sig, std::move(universe), std::move(relations));
}

/// Random size in [min_size, max_size].
inline int random_size(std::mt19937_64& rng, int min_size, int max_size) {
  if (max_size <= min_size) return min_size;
  return min_size + static_cast<int>(rng() % static_cast<std::uint64_t>(max_size - min_size + 1));
}

/// The two-edge path a - b - c (homomorphically equivalent to an edge).
inline Structure path3() {
  return Structure(Signature({{"E", 2}}), {"a", "b", "c"},
                   {{"E", {{"a", "b"}, {"b", "a"}, {"b", "c"}, {"c", "b"}}}});
}

/// Ternary xor operation on {0,1}: a cyclic polymorphism of the parity
/// template (and of K2).
inline Polymorphism xor3(const Structure& tmpl) {
  Polymorphism f;
  f.tmpl = tmpl;
  f.arity = 3;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        f.table[{std::to_string(a), std::to_string(b), std::to_string(c)}] =
            std::to_string(a ^ b ^ c);
  return f;
}

/// Ternary majority operation on {0,1}: a cyclic polymorphism of K2.
inline Polymorphism majority3(const Structure& tmpl) {
  Polymorphism f;
  f.tmpl = tmpl;
  f.arity = 3;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        f.table[{std::to_string(a), std::to_string(b), std::to_string(c)}] =
            std::to_string((a + b + c) >= 2 ? 1 : 0);
  return f;
}

}  // namespace testutil
