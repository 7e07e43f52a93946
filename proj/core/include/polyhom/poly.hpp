#pragma once

#include <cstdint>
#include <optional>

#include "polyhom/hom.hpp"

namespace polyhom {

/// An n-ary operation on a template's universe, stored as a total table from
/// argument tuples to values.  Whether the table actually preserves the
/// template's relations is checked by is_valid_polymorphism, never assumed.
struct Polymorphism {
  Structure tmpl;
  int arity = 0;
  std::map<Tuple, std::string> table;
};

/// True iff the table is total on universe(tmpl)^arity and, viewed as a map
/// power(tmpl, arity) -> tmpl, is a homomorphism.  Checked columnwise without
/// materializing the power.
bool is_valid_polymorphism(const Polymorphism& f);

/// True iff f(x_0,...,x_{p-1}) = f(x_1,...,x_{p-1},x_0) for every tuple.
bool is_cyclic(const Polymorphism& f);

/// Weak near-unanimity: f idempotent and f(y,x,...,x) = f(x,y,x,...,x) = ...
/// = f(x,...,x,y) for all x, y.  Requires arity >= 2.
bool is_wnu(const Polymorphism& f);

/// 1-based indices of coordinates whose value can change f's output with the
/// other coordinates fixed.  "Essentially a projection" iff at most one.
std::set<int> essential_coordinates(const Polymorphism& f);

bool is_prime(int n);
/// Smallest prime strictly greater than n.
int next_prime_above(int n);

/// The partition of all p-tuples over {0,...,domain_size-1} into orbits of
/// the cyclic shift (x_0,...,x_{p-1}) -> (x_1,...,x_{p-1},x_0).  For prime p
/// orbit sizes are 1 (constant tuples) or p, and the orbit count is
/// (domain_size^p + (p-1)*domain_size)/p.
class CyclicOrbitIndex {
 public:
  CyclicOrbitIndex(int domain_size, int p);

  int domain_size() const { return domain_size_; }
  int arity() const { return arity_; }
  int orbit_count() const { return static_cast<int>(representatives_.size()); }
  /// Lexicographically least tuple of each orbit, in ascending order.
  const std::vector<std::vector<int>>& representatives() const { return representatives_; }
  int orbit_of(const std::vector<int>& tuple) const;
  /// Size of one orbit (1 or p for prime p).
  int orbit_size(int orbit) const;

 private:
  int domain_size_ = 0;
  int arity_ = 0;
  std::vector<std::vector<int>> representatives_;
  std::vector<int> orbit_by_code_;  // encoded tuple -> orbit id
};

/// Factory matching the index constructor; p must be prime, domain_size >= 1.
CyclicOrbitIndex cyclic_orbits(int domain_size, int p);

struct CyclicSearchResult {
  SearchStatus status = SearchStatus::absent;
  std::optional<Polymorphism> witness;
  std::uint64_t nodes = 0;
};

/// Searches for an arity-p cyclic polymorphism of tmpl by homomorphism
/// search on the orbit-collapsed indicator structure (one variable per
/// cyclic-shift orbit of p-tuples, constraints induced from power(tmpl, p)).
/// Absence is certified by exhaustive search; budget exhaustion is unknown.
CyclicSearchResult find_cyclic_polymorphism(const Structure& tmpl, int p,
                                            const SearchOptions& options = {});

/// The orbit-collapsed indicator instance used by find_cyclic_polymorphism:
/// universe = one element per orbit (named by its representative tuple), and
/// for every p-tuple of R-tuples the componentwise orbit tuple is in R.
Structure cyclic_indicator(const Structure& tmpl, int p);

struct StarDecision {
  /// found: tmpl has a cyclic polymorphism of the smallest prime arity
  /// p > |universe(tmpl)| (and hence of every prime arity above it);
  /// absent: it has none; unknown: the search ran out of budget.
  SearchStatus status = SearchStatus::absent;
  int prime = 0;
  std::optional<Polymorphism> witness;
  std::uint64_t nodes = 0;
};

StarDecision decide_star(const Structure& tmpl, const SearchOptions& options = {});

}  // namespace polyhom
