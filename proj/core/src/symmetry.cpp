#include "polyhom/symmetry.hpp"

#include <algorithm>
#include <stdexcept>

namespace polyhom {

namespace {

std::map<std::string, std::string> compose_maps(
    const std::map<std::string, std::string>& first,
    const std::map<std::string, std::string>& then) {
  std::map<std::string, std::string> out;
  for (const auto& [x, y] : first) out[x] = then.at(y);
  return out;
}

bool is_identity(const std::map<std::string, std::string>& m) {
  return std::all_of(m.begin(), m.end(),
                     [](const auto& kv) { return kv.first == kv.second; });
}

}  // namespace

Permutation::Permutation(std::map<std::string, std::string> mapping, int order)
    : mapping_(std::move(mapping)), order_(order) {
  if (order_ < 1)
    throw std::invalid_argument("permutation: order must be >= 1, got " +
                                std::to_string(order_));
  std::set<std::string> image;
  for (const auto& [x, y] : mapping_) {
    if (!mapping_.count(y))
      throw std::invalid_argument("permutation: image '" + y +
                                  "' of '" + x + "' is outside the domain");
    image.insert(y);
  }
  if (image.size() != mapping_.size())
    throw std::invalid_argument("permutation: mapping is not a bijection");
  // Exactness: the declared order is the first power giving the identity.
  std::map<std::string, std::string> acc = mapping_;
  for (int k = 1; k < order_; ++k) {
    if (is_identity(acc))
      throw std::invalid_argument("permutation: declared order " +
                                  std::to_string(order_) + " is not exact (power " +
                                  std::to_string(k) + " is already the identity)");
    acc = compose_maps(acc, mapping_);
  }
  if (!is_identity(acc))
    throw std::invalid_argument("permutation: power " + std::to_string(order_) +
                                " is not the identity");
}

Permutation Permutation::identity(const std::vector<std::string>& universe) {
  std::map<std::string, std::string> mapping;
  for (const std::string& x : universe) mapping[x] = x;
  return Permutation(std::move(mapping), 1);
}

const std::string& Permutation::apply(const std::string& x) const {
  auto it = mapping_.find(x);
  if (it == mapping_.end())
    throw std::invalid_argument("permutation: '" + x + "' is outside the domain");
  return it->second;
}

Permutation Permutation::inverse() const {
  std::map<std::string, std::string> mapping;
  for (const auto& [x, y] : mapping_) mapping[y] = x;
  return Permutation(std::move(mapping), order_);
}

bool Permutation::commutes_with(const Permutation& other) const {
  return compose_maps(mapping_, other.mapping_) ==
         compose_maps(other.mapping_, mapping_);
}

bool Permutation::acts_on(const std::vector<std::string>& universe) const {
  if (universe.size() != mapping_.size()) return false;
  return std::all_of(universe.begin(), universe.end(),
                     [&](const std::string& x) { return mapping_.count(x) != 0; });
}

GeneratedAction::GeneratedAction(std::vector<std::string> universe,
                                 std::vector<Permutation> generators, bool commutative)
    : universe_(std::move(universe)),
      generators_(std::move(generators)),
      commutative_(commutative) {
  std::set<std::string> names(universe_.begin(), universe_.end());
  if (names.size() != universe_.size())
    throw std::invalid_argument("action: universe has duplicate elements");
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if (!generators_[i].acts_on(universe_))
      throw std::invalid_argument("action: generator " + std::to_string(i + 1) +
                                  " does not act on the universe");
    if (!is_prime(generators_[i].order()))
      throw std::invalid_argument("action: generator " + std::to_string(i + 1) +
                                  " has non-prime order " +
                                  std::to_string(generators_[i].order()));
  }
  if (commutative_) {
    for (std::size_t i = 0; i < generators_.size(); ++i)
      for (std::size_t j = i + 1; j < generators_.size(); ++j)
        if (!generators_[i].commutes_with(generators_[j]))
          throw std::invalid_argument("action: generators " + std::to_string(i + 1) +
                                      " and " + std::to_string(j + 1) +
                                      " do not commute");
  }
}

EquivalencePartition GeneratedAction::orbits() const {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < universe_.size(); ++i)
    index[universe_[i]] = static_cast<int>(i);
  std::vector<int> dsu(universe_.size());
  for (std::size_t i = 0; i < dsu.size(); ++i) dsu[i] = static_cast<int>(i);
  auto find = [&](int v) {
    while (dsu[v] != v) v = dsu[v] = dsu[dsu[v]];
    return v;
  };
  for (const Permutation& g : generators_)
    for (const auto& [x, y] : g.mapping()) dsu[find(index.at(x))] = find(index.at(y));

  std::map<int, std::vector<std::string>> blocks;
  for (std::size_t i = 0; i < universe_.size(); ++i)
    blocks[find(static_cast<int>(i))].push_back(universe_[i]);
  EquivalencePartition partition;
  std::vector<std::pair<int, const std::vector<std::string>*>> ordered;
  for (const auto& [root, members] : blocks)
    ordered.emplace_back(index.at(members.front()), &members);
  std::sort(ordered.begin(), ordered.end());
  for (const auto& [pos, members] : ordered) {
    (void)pos;
    partition.blocks.push_back(*members);
  }
  return partition;
}

bool preserves(const Permutation& gamma, const Structure& x) {
  if (!gamma.acts_on(x.universe()))
    throw std::invalid_argument("preserves: permutation does not act on the universe");
  for (const auto& [name, tuples] : x.relations()) {
    TupleSet image;
    for (const Tuple& t : tuples) {
      Tuple u(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) u[i] = gamma.apply(t[i]);
      image.insert(std::move(u));
    }
    if (image != tuples) return false;
  }
  return true;
}

Homomorphism symmetrize(const Homomorphism& h0, const Permutation& gamma,
                        const Polymorphism& f) {
  if (!is_valid_hom(h0))
    throw std::invalid_argument("symmetrize: h0 is not a valid homomorphism");
  if (!(f.tmpl == h0.target))
    throw std::invalid_argument(
        "symmetrize: the polymorphism's template differs from h0's target");
  const int p = f.arity;
  if (!is_prime(p))
    throw std::invalid_argument("symmetrize: polymorphism arity " + std::to_string(p) +
                                " is not prime");
  if (!is_valid_polymorphism(f))
    throw std::invalid_argument("symmetrize: f is not a polymorphism of the target");
  if (!is_cyclic(f))
    throw std::invalid_argument("symmetrize: f is not cyclic");
  if (!preserves(gamma, h0.source))
    throw std::invalid_argument("symmetrize: gamma does not preserve the instance");
  if (p % gamma.order() != 0)
    throw std::invalid_argument("symmetrize: gamma's order " +
                                std::to_string(gamma.order()) +
                                " does not divide the arity " + std::to_string(p));

  // Walk each backward orbit once: x, gamma^-1 x, ..., gamma^-(p-1) x.
  const Permutation inv = gamma.inverse();
  std::map<std::string, std::string> map;
  for (const std::string& x : h0.source.universe()) {
    Tuple args(p);
    std::string y = x;
    for (int i = 0; i < p; ++i) {
      args[i] = h0.map.at(y);
      y = inv.apply(y);
    }
    map[x] = f.table.at(args);
  }

  Homomorphism h{h0.source, h0.target, std::move(map)};
  if (!is_valid_hom(h))
    throw std::logic_error("symmetrize: output failed homomorphism validation");
  for (const std::string& x : h.source.universe()) {
    if (h.map.at(gamma.apply(x)) != h.map.at(x))
      throw std::logic_error("symmetrize: output is not gamma-invariant");
  }
  return h;
}

Homomorphism make_invariant(const Homomorphism& h0, const GeneratedAction& action,
                            const std::map<int, Polymorphism>& polys_by_order) {
  if (!action.commutative())
    throw std::invalid_argument(
        "make_invariant: the action is not declared commutative");
  if (!is_valid_hom(h0))
    throw std::invalid_argument("make_invariant: h0 is not a valid homomorphism");
  std::set<std::string> names(h0.source.universe().begin(), h0.source.universe().end());
  if (std::set<std::string>(action.universe().begin(), action.universe().end()) != names)
    throw std::invalid_argument(
        "make_invariant: the action universe differs from the instance universe");

  Homomorphism h = h0;
  for (const Permutation& g : action.generators()) {
    auto poly = polys_by_order.find(g.order());
    if (poly == polys_by_order.end())
      throw std::invalid_argument("make_invariant: missing polymorphism for order " +
                                  std::to_string(g.order()));
    h = symmetrize(h, g, poly->second);
  }
  // The "moreover" clause: every earlier invariance survives the later
  // symmetrization rounds because the generators commute.
  for (std::size_t i = 0; i < action.generators().size(); ++i) {
    const Permutation& g = action.generators()[i];
    for (const std::string& x : h.source.universe()) {
      if (h.map.at(g.apply(x)) != h.map.at(x))
        throw std::logic_error("make_invariant: generator " + std::to_string(i + 1) +
                               " invariance was lost");
    }
  }
  return h;
}

std::pair<Structure, GeneratedAction> schreier_instance(const std::vector<int>& primes) {
  if (primes.empty())
    throw std::invalid_argument("schreier: at least one odd prime required");
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (!is_prime(primes[i]) || primes[i] == 2)
      throw std::invalid_argument("schreier: " + std::to_string(primes[i]) +
                                  " is not an odd prime");
    if (i > 0 && primes[i] <= primes[i - 1])
      throw std::invalid_argument("schreier: primes must be strictly increasing");
  }

  std::vector<std::string> universe;
  TupleSet edges;
  for (int p : primes) {
    std::vector<std::string> cycle;
    for (int j = 0; j < p; ++j)
      cycle.push_back(std::to_string(p) + "_" + std::to_string(j));
    universe.insert(universe.end(), cycle.begin(), cycle.end());
    for (int j = 0; j < p; ++j) {
      const std::string& a = cycle[j];
      const std::string& b = cycle[(j + 1) % p];
      edges.insert({a, b});
      edges.insert({b, a});
    }
  }
  Structure graph(Signature({{"E", 2}}), universe, {{"E", std::move(edges)}});

  std::vector<Permutation> generators;
  for (int p : primes) {
    std::map<std::string, std::string> mapping;
    for (const std::string& v : universe) mapping[v] = v;
    for (int j = 0; j < p; ++j)
      mapping[std::to_string(p) + "_" + std::to_string(j)] =
          std::to_string(p) + "_" + std::to_string((j + 1) % p);
    generators.emplace_back(std::move(mapping), p);
  }
  GeneratedAction action(universe, std::move(generators), true);
  return {std::move(graph), std::move(action)};
}

InvariantSearchResult invariant_hom_exists(const Structure& x,
                                           const GeneratedAction& action,
                                           const Structure& tmpl,
                                           const SearchOptions& options) {
  std::set<std::string> names(x.universe().begin(), x.universe().end());
  if (std::set<std::string>(action.universe().begin(), action.universe().end()) != names)
    throw std::invalid_argument(
        "invariant_hom_exists: the action universe differs from the instance universe");
  for (std::size_t i = 0; i < action.generators().size(); ++i) {
    if (!preserves(action.generators()[i], x))
      throw std::invalid_argument("invariant_hom_exists: generator " +
                                  std::to_string(i + 1) +
                                  " does not preserve the instance");
  }

  // A homomorphism is invariant under every generator iff it is constant on
  // orbits, i.e. factors through the orbit quotient.
  const EquivalencePartition partition = action.orbits();
  const Structure quotient_instance = quotient(x, partition);
  const HomSearchResult r = find_hom(quotient_instance, tmpl, options);

  InvariantSearchResult result;
  result.status = r.status;
  result.nodes = r.nodes;
  if (r.status != SearchStatus::found) return result;

  std::map<std::string, std::string> block_name;
  for (const std::vector<std::string>& block : partition.blocks) {
    // quotient names each block after its earliest member in universe order.
    std::string lead = block.front();
    int best = x.index_of(lead);
    for (const std::string& e : block) {
      if (x.index_of(e) < best) {
        best = x.index_of(e);
        lead = e;
      }
    }
    for (const std::string& e : block) block_name[e] = lead;
  }
  std::map<std::string, std::string> lifted;
  for (const std::string& e : x.universe())
    lifted[e] = r.witness->map.at(block_name.at(e));
  Homomorphism witness{x, tmpl, std::move(lifted)};
  if (!is_valid_hom(witness))
    throw std::logic_error("invariant_hom_exists: lifted witness failed validation");
  result.witness = std::move(witness);
  return result;
}

}  // namespace polyhom
