#include "polyhom/structure.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace polyhom {

namespace {

std::string quoted(const std::string& s) { return "'" + s + "'"; }

bool all_digits(const std::string& s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Signature::Signature(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  for (const Symbol& sym : symbols_) {
    if (sym.name.empty())
      throw std::invalid_argument("signature: symbol with empty name");
    if (sym.arity < 1)
      throw std::invalid_argument("signature: symbol " + quoted(sym.name) +
                                  " has non-positive arity " + std::to_string(sym.arity));
    if (!arity_.emplace(sym.name, sym.arity).second)
      throw std::invalid_argument("signature: duplicate symbol " + quoted(sym.name));
  }
}

int Signature::arity_of(const std::string& name) const {
  auto it = arity_.find(name);
  if (it == arity_.end())
    throw std::invalid_argument("signature: unknown symbol " + quoted(name));
  return it->second;
}

Structure::Structure(Signature sig, std::vector<std::string> universe,
                     std::map<std::string, TupleSet> relations)
    : sig_(std::move(sig)), universe_(std::move(universe)) {
  for (int i = 0; i < static_cast<int>(universe_.size()); ++i) {
    if (universe_[i].empty())
      throw std::invalid_argument("universe: element with empty name");
    if (!index_.emplace(universe_[i], i).second)
      throw std::invalid_argument("universe: duplicate element " + quoted(universe_[i]));
  }
  for (const auto& [name, tuples] : relations) {
    if (!sig_.has(name))
      throw std::invalid_argument("relations: symbol " + quoted(name) +
                                  " is not in the signature");
    const int arity = sig_.arity_of(name);
    for (const Tuple& t : tuples) {
      if (static_cast<int>(t.size()) != arity)
        throw std::invalid_argument("relation " + quoted(name) + ": tuple (" +
                                    join_tuple(t) + ") has length " +
                                    std::to_string(t.size()) + ", arity is " +
                                    std::to_string(arity));
      for (const std::string& e : t) {
        if (!index_.count(e))
          throw std::invalid_argument("relation " + quoted(name) + ": tuple entry " +
                                      quoted(e) + " is not a universe element");
      }
    }
  }
  // Every signature symbol gets a tuple set; omitted symbols denote empty ones.
  for (const Symbol& sym : sig_.symbols()) {
    auto it = relations.find(sym.name);
    relations_[sym.name] = it == relations.end() ? TupleSet{} : std::move(it->second);
  }
}

int Structure::index_of(const std::string& e) const {
  auto it = index_.find(e);
  if (it == index_.end())
    throw std::invalid_argument("structure: unknown element " + quoted(e));
  return it->second;
}

const TupleSet& Structure::relation(const std::string& symbol) const {
  auto it = relations_.find(symbol);
  if (it == relations_.end())
    throw std::invalid_argument("structure: unknown relation symbol " + quoted(symbol));
  return it->second;
}

std::string join_tuple(const Tuple& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ',';
    out += t[i];
  }
  return out;
}

Tuple split_element(const std::string& e) {
  Tuple out;
  std::string cur;
  for (char c : e) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Structure power(const Structure& base, int exponent) {
  if (exponent < 1)
    throw std::invalid_argument("power: exponent must be >= 1, got " +
                                std::to_string(exponent));
  for (const std::string& e : base.universe()) {
    if (e.find(',') != std::string::npos)
      throw std::invalid_argument("power: element name " + quoted(e) +
                                  " contains the reserved delimiter ','");
  }
  const std::size_t n = base.universe().size();

  // Universe: all exponent-tuples in odometer order, first coordinate slowest.
  std::vector<std::string> universe;
  if (n > 0) {
    std::size_t count = 1;
    for (int i = 0; i < exponent; ++i) {
      if (count > 1'000'000 / n)
        throw std::invalid_argument("power: universe of size " +
                                    std::to_string(n) + "^" + std::to_string(exponent) +
                                    " exceeds the 1e6 element cap");
      count *= n;
    }
    universe.reserve(count);
    std::vector<std::size_t> odo(exponent, 0);
    while (true) {
      Tuple t(exponent);
      for (int i = 0; i < exponent; ++i) t[i] = base.universe()[odo[i]];
      universe.push_back(join_tuple(t));
      int pos = exponent - 1;
      while (pos >= 0 && ++odo[pos] == n) odo[pos--] = 0;
      if (pos < 0) break;
    }
  }

  // A tuple of power elements is related iff every coordinate slice is.
  std::map<std::string, TupleSet> relations;
  for (const Symbol& sym : base.signature().symbols()) {
    const TupleSet& tuples = base.relation(sym.name);
    TupleSet& out = relations[sym.name];
    if (tuples.empty()) continue;
    // Odometer over exponent-many base tuples; coordinate j of power element i
    // is entry i of the j-th chosen base tuple.
    std::vector<Tuple> chosen(exponent, *tuples.begin());
    std::vector<TupleSet::const_iterator> its(exponent, tuples.begin());
    while (true) {
      Tuple t(sym.arity);
      for (int i = 0; i < sym.arity; ++i) {
        Tuple coords(exponent);
        for (int j = 0; j < exponent; ++j) coords[j] = (*its[j])[i];
        t[i] = join_tuple(coords);
      }
      out.insert(std::move(t));
      int pos = exponent - 1;
      while (pos >= 0 && ++its[pos] == tuples.end()) its[pos--] = tuples.begin();
      if (pos < 0) break;
    }
  }
  return Structure(base.signature(), std::move(universe), std::move(relations));
}

Structure induced_substructure(const Structure& s, const std::set<std::string>& keep) {
  for (const std::string& e : keep) {
    if (!s.has_element(e))
      throw std::invalid_argument("induced_substructure: unknown element " + quoted(e));
  }
  std::vector<std::string> universe;
  for (const std::string& e : s.universe())
    if (keep.count(e)) universe.push_back(e);

  std::map<std::string, TupleSet> relations;
  for (const auto& [name, tuples] : s.relations()) {
    TupleSet& out = relations[name];
    for (const Tuple& t : tuples) {
      if (std::all_of(t.begin(), t.end(),
                      [&](const std::string& e) { return keep.count(e) != 0; }))
        out.insert(t);
    }
  }
  return Structure(s.signature(), std::move(universe), std::move(relations));
}

Structure quotient(const Structure& s, const EquivalencePartition& partition) {
  // Validate: blocks are nonempty, disjoint, and cover the universe exactly.
  std::map<std::string, int> block_of;
  for (int b = 0; b < static_cast<int>(partition.blocks.size()); ++b) {
    if (partition.blocks[b].empty())
      throw std::invalid_argument("quotient: partition block " + std::to_string(b) +
                                  " is empty");
    for (const std::string& e : partition.blocks[b]) {
      if (!s.has_element(e))
        throw std::invalid_argument("quotient: partition mentions unknown element " +
                                    quoted(e));
      if (!block_of.emplace(e, b).second)
        throw std::invalid_argument("quotient: element " + quoted(e) +
                                    " appears in two blocks");
    }
  }
  if (block_of.size() != s.size())
    throw std::invalid_argument("quotient: partition does not cover the universe (" +
                                std::to_string(block_of.size()) + " of " +
                                std::to_string(s.size()) + " elements)");

  // Each block is named after its earliest member in the universe order, and
  // blocks are ordered by that member.
  const int nblocks = static_cast<int>(partition.blocks.size());
  std::vector<int> first_pos(nblocks, -1);
  for (int i = 0; i < static_cast<int>(s.size()); ++i) {
    int b = block_of.at(s.universe()[i]);
    if (first_pos[b] < 0) first_pos[b] = i;
  }
  std::vector<int> order(nblocks);
  for (int b = 0; b < nblocks; ++b) order[b] = b;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return first_pos[a] < first_pos[b]; });

  std::vector<std::string> universe;
  std::map<int, std::string> name_of;
  for (int b : order) {
    const std::string& name = s.universe()[first_pos[b]];
    name_of[b] = name;
    universe.push_back(name);
  }

  std::map<std::string, TupleSet> relations;
  for (const auto& [name, tuples] : s.relations()) {
    TupleSet& out = relations[name];
    for (const Tuple& t : tuples) {
      Tuple image(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) image[i] = name_of.at(block_of.at(t[i]));
      out.insert(std::move(image));
    }
  }
  return Structure(s.signature(), std::move(universe), std::move(relations));
}

bool isomorphic_via(const Structure& a, const Structure& b,
                    const std::map<std::string, std::string>& bijection) {
  if (!(a.signature() == b.signature())) return false;
  if (bijection.size() != a.size() || a.size() != b.size()) return false;
  std::set<std::string> image;
  for (const auto& [x, y] : bijection) {
    if (!a.has_element(x) || !b.has_element(y)) return false;
    image.insert(y);
  }
  if (image.size() != b.size()) return false;
  for (const auto& [name, tuples] : a.relations()) {
    TupleSet mapped;
    for (const Tuple& t : tuples) {
      Tuple u(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) u[i] = bijection.at(t[i]);
      mapped.insert(std::move(u));
    }
    if (mapped != b.relation(name)) return false;
  }
  return true;
}

namespace {

Structure complete_graph(int n) {
  if (n < 1) throw std::invalid_argument("builtin: Kn requires n >= 1");
  std::vector<std::string> universe;
  for (int i = 0; i < n; ++i) universe.push_back(std::to_string(i));
  TupleSet edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) edges.insert({universe[i], universe[j]});
  return Structure(Signature({{"E", 2}}), std::move(universe), {{"E", std::move(edges)}});
}

Structure cycle_graph(int n) {
  if (n < 3) throw std::invalid_argument("builtin: Cn requires n >= 3");
  std::vector<std::string> universe;
  for (int i = 0; i < n; ++i) universe.push_back(std::to_string(i));
  TupleSet edges;
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    edges.insert({universe[i], universe[j]});
    edges.insert({universe[j], universe[i]});
  }
  return Structure(Signature({{"E", 2}}), std::move(universe), {{"E", std::move(edges)}});
}

Structure three_lin_two() {
  std::vector<std::string> universe = {"0", "1"};
  TupleSet s0, s1;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) {
        Tuple t = {std::to_string(x), std::to_string(y), std::to_string(z)};
        ((x + y + z) % 2 == 0 ? s0 : s1).insert(std::move(t));
      }
  return Structure(Signature({{"S0", 3}, {"S1", 3}}), std::move(universe),
                   {{"S0", std::move(s0)}, {"S1", std::move(s1)}});
}

}  // namespace

std::optional<Structure> builtin_structure(const std::string& name) {
  if (name == "K2") return complete_graph(2);
  if (name == "K3") return complete_graph(3);
  if (name == "3LIN2") return three_lin_two();
  if (name.rfind("Kn:", 0) == 0) {
    const std::string num = name.substr(3);
    if (!all_digits(num)) return std::nullopt;
    return complete_graph(std::stoi(num));
  }
  if (name.rfind("Cn:", 0) == 0) {
    const std::string num = name.substr(3);
    if (!all_digits(num)) return std::nullopt;
    return cycle_graph(std::stoi(num));
  }
  // Shorthand spellings K<n> and C<n>.
  if (name.size() > 1 && (name[0] == 'K' || name[0] == 'C') && all_digits(name.substr(1))) {
    const int n = std::stoi(name.substr(1));
    return name[0] == 'K' ? complete_graph(n) : cycle_graph(n);
  }
  return std::nullopt;
}

}  // namespace polyhom
