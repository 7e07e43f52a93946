#include "polyhom/poly.hpp"

#include <algorithm>
#include <stdexcept>

namespace polyhom {

namespace {

constexpr std::uint64_t kTupleSpaceCap = 20'000'000;

// domain_size^p with an overflow-safe cap check.
std::uint64_t tuple_space_size(int domain_size, int p) {
  std::uint64_t size = 1;
  for (int i = 0; i < p; ++i) {
    size *= static_cast<std::uint64_t>(domain_size);
    if (size > kTupleSpaceCap)
      throw std::invalid_argument("cyclic orbits: tuple space " +
                                  std::to_string(domain_size) + "^" + std::to_string(p) +
                                  " exceeds the enumeration cap");
  }
  return size;
}

}  // namespace

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

int next_prime_above(int n) {
  int p = n + 1;
  while (!is_prime(p)) ++p;
  return p;
}

bool is_valid_polymorphism(const Polymorphism& f) {
  if (f.arity < 1) return false;
  const std::vector<std::string>& dom = f.tmpl.universe();
  const std::uint64_t expected = [&] {
    std::uint64_t e = 1;
    for (int i = 0; i < f.arity; ++i) e *= dom.size();
    return e;
  }();
  if (f.table.size() != expected) return false;
  for (const auto& [args, value] : f.table) {
    if (static_cast<int>(args.size()) != f.arity) return false;
    for (const std::string& a : args)
      if (!f.tmpl.has_element(a)) return false;
    if (!f.tmpl.has_element(value)) return false;
  }
  // Preservation, checked columnwise: for every arity-tuple of R-tuples the
  // row of f-values applied to the argument columns must again be in R.
  for (const auto& [name, tuples] : f.tmpl.relations()) {
    if (tuples.empty()) continue;
    const int k = static_cast<int>(tuples.begin()->size());
    std::vector<TupleSet::const_iterator> its(f.arity, tuples.begin());
    while (true) {
      Tuple image(k);
      Tuple column(f.arity);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < f.arity; ++j) column[j] = (*its[j])[i];
        auto it = f.table.find(column);
        if (it == f.table.end()) return false;
        image[i] = it->second;
      }
      if (!tuples.count(image)) return false;
      int pos = f.arity - 1;
      while (pos >= 0 && ++its[pos] == tuples.end()) its[pos--] = tuples.begin();
      if (pos < 0) break;
    }
  }
  return true;
}

bool is_cyclic(const Polymorphism& f) {
  if (f.arity < 2) return f.arity == 1;
  for (const auto& [args, value] : f.table) {
    Tuple rotated(args.begin() + 1, args.end());
    rotated.push_back(args.front());
    auto it = f.table.find(rotated);
    if (it == f.table.end() || it->second != value) return false;
  }
  return true;
}

bool is_wnu(const Polymorphism& f) {
  if (f.arity < 2)
    throw std::invalid_argument("is_wnu: arity must be >= 2, got " +
                                std::to_string(f.arity));
  const std::vector<std::string>& dom = f.tmpl.universe();
  for (const std::string& x : dom) {
    if (f.table.at(Tuple(f.arity, x)) != x) return false;  // idempotence
    for (const std::string& y : dom) {
      if (y == x) continue;
      Tuple args(f.arity, x);
      args[0] = y;
      const std::string first = f.table.at(args);
      for (int i = 1; i < f.arity; ++i) {
        args[i - 1] = x;
        args[i] = y;
        if (f.table.at(args) != first) return false;
      }
    }
  }
  return true;
}

std::set<int> essential_coordinates(const Polymorphism& f) {
  std::set<int> essential;
  const std::vector<std::string>& dom = f.tmpl.universe();
  for (int i = 0; i < f.arity; ++i) {
    bool found = false;
    for (const auto& [args, value] : f.table) {
      Tuple flipped = args;
      for (const std::string& v : dom) {
        if (v == args[i]) continue;
        flipped[i] = v;
        if (f.table.at(flipped) != value) {
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (found) essential.insert(i + 1);
  }
  return essential;
}

CyclicOrbitIndex::CyclicOrbitIndex(int domain_size, int p)
    : domain_size_(domain_size), arity_(p) {
  if (domain_size < 1)
    throw std::invalid_argument("cyclic orbits: domain size must be >= 1, got " +
                                std::to_string(domain_size));
  if (!is_prime(p))
    throw std::invalid_argument("cyclic orbits: arity " + std::to_string(p) +
                                " is not prime");
  const std::uint64_t total = tuple_space_size(domain_size, p);
  orbit_by_code_.assign(total, -1);

  std::vector<int> tuple(p, 0);
  std::uint64_t code = 0;
  while (true) {
    if (orbit_by_code_[code] < 0) {
      // New orbit: mark every rotation; the enumeration order makes the
      // first-seen tuple the lexicographically least representative.
      const int id = static_cast<int>(representatives_.size());
      representatives_.push_back(tuple);
      std::vector<int> rot = tuple;
      for (int r = 0; r < p; ++r) {
        std::uint64_t rc = 0;
        for (int i = 0; i < p; ++i)
          rc = rc * static_cast<std::uint64_t>(domain_size) + rot[i];
        orbit_by_code_[rc] = id;
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
      }
    }
    int pos = p - 1;
    while (pos >= 0 && ++tuple[pos] == domain_size) tuple[pos--] = 0;
    if (pos < 0) break;
    code = 0;
    for (int i = 0; i < p; ++i)
      code = code * static_cast<std::uint64_t>(domain_size) + tuple[i];
  }
}

int CyclicOrbitIndex::orbit_of(const std::vector<int>& tuple) const {
  if (static_cast<int>(tuple.size()) != arity_)
    throw std::invalid_argument("orbit_of: tuple length " + std::to_string(tuple.size()) +
                                " differs from arity " + std::to_string(arity_));
  std::uint64_t code = 0;
  for (int v : tuple) {
    if (v < 0 || v >= domain_size_)
      throw std::invalid_argument("orbit_of: entry " + std::to_string(v) +
                                  " outside the domain");
    code = code * static_cast<std::uint64_t>(domain_size_) + v;
  }
  return orbit_by_code_[code];
}

int CyclicOrbitIndex::orbit_size(int orbit) const {
  const std::vector<int>& rep = representatives_.at(orbit);
  std::vector<int> rot = rep;
  std::rotate(rot.begin(), rot.begin() + 1, rot.end());
  return rot == rep ? 1 : arity_;
}

CyclicOrbitIndex cyclic_orbits(int domain_size, int p) {
  return CyclicOrbitIndex(domain_size, p);
}

Structure cyclic_indicator(const Structure& tmpl, int p) {
  for (const std::string& e : tmpl.universe()) {
    if (e.find(',') != std::string::npos)
      throw std::invalid_argument("cyclic_indicator: element name '" + e +
                                  "' contains the reserved delimiter ','");
  }
  const CyclicOrbitIndex orbits(static_cast<int>(tmpl.size()), p);

  std::vector<std::string> universe;
  universe.reserve(orbits.orbit_count());
  for (const std::vector<int>& rep : orbits.representatives()) {
    Tuple named(rep.size());
    for (std::size_t i = 0; i < rep.size(); ++i) named[i] = tmpl.universe()[rep[i]];
    universe.push_back(join_tuple(named));
  }

  std::map<std::string, TupleSet> relations;
  for (const auto& [name, tuples] : tmpl.relations()) {
    TupleSet& out = relations[name];
    if (tuples.empty()) continue;
    const int k = static_cast<int>(tuples.begin()->size());
    // Guard: |R|^p combinations are enumerated below.
    std::uint64_t combos = 1;
    for (int j = 0; j < p; ++j) {
      combos *= tuples.size();
      if (combos > kTupleSpaceCap)
        throw std::invalid_argument("cyclic_indicator: relation '" + name +
                                    "' yields more than the enumeration cap of "
                                    "constraint combinations");
    }
    // For every p-tuple of R-tuples, argument position i contributes the
    // p-tuple of its entries; the orbit names of those columns form one
    // induced constraint tuple.
    std::vector<TupleSet::const_iterator> its(p, tuples.begin());
    std::vector<int> column(p);
    while (true) {
      Tuple t(k);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < p; ++j) column[j] = tmpl.index_of((*its[j])[i]);
        t[i] = universe[orbits.orbit_of(column)];
      }
      out.insert(std::move(t));
      int pos = p - 1;
      while (pos >= 0 && ++its[pos] == tuples.end()) its[pos--] = tuples.begin();
      if (pos < 0) break;
    }
  }
  return Structure(tmpl.signature(), std::move(universe), std::move(relations));
}

CyclicSearchResult find_cyclic_polymorphism(const Structure& tmpl, int p,
                                            const SearchOptions& options) {
  if (!is_prime(p))
    throw std::invalid_argument("find_cyclic_polymorphism: arity " + std::to_string(p) +
                                " is not prime");
  CyclicSearchResult result;
  if (tmpl.size() == 0) {
    // No elements: the empty table is vacuously a cyclic polymorphism.
    result.status = SearchStatus::found;
    result.witness = Polymorphism{tmpl, p, {}};
    return result;
  }

  const Structure indicator = cyclic_indicator(tmpl, p);
  const HomSearchResult search = find_hom(indicator, tmpl, options);
  result.status = search.status;
  result.nodes = search.nodes;
  if (search.status != SearchStatus::found) return result;

  // Expand the per-orbit assignment to the full table.
  const CyclicOrbitIndex orbits(static_cast<int>(tmpl.size()), p);
  Polymorphism poly;
  poly.tmpl = tmpl;
  poly.arity = p;
  std::vector<int> tuple(p, 0);
  while (true) {
    Tuple args(p);
    for (int i = 0; i < p; ++i) args[i] = tmpl.universe()[tuple[i]];
    const std::string& orbit_name = indicator.universe()[orbits.orbit_of(tuple)];
    poly.table[std::move(args)] = search.witness->map.at(orbit_name);
    int pos = p - 1;
    while (pos >= 0 && ++tuple[pos] == static_cast<int>(tmpl.size())) tuple[pos--] = 0;
    if (pos < 0) break;
  }
  if (!is_valid_polymorphism(poly) || !is_cyclic(poly))
    throw std::logic_error(
        "find_cyclic_polymorphism: orbit-collapse produced an invalid witness");
  result.witness = std::move(poly);
  return result;
}

StarDecision decide_star(const Structure& tmpl, const SearchOptions& options) {
  StarDecision decision;
  decision.prime = next_prime_above(static_cast<int>(tmpl.size()));
  CyclicSearchResult search = find_cyclic_polymorphism(tmpl, decision.prime, options);
  decision.status = search.status;
  decision.witness = std::move(search.witness);
  decision.nodes = search.nodes;
  return decision;
}

}  // namespace polyhom
