#pragma once

#include <optional>
#include <utility>

#include "polyhom/hom.hpp"
#include "polyhom/poly.hpp"

namespace polyhom {

/// A bijection on a finite set of names with a declared exact order:
/// the order-fold composition is the identity and no smaller positive
/// power is.  Both facts are verified at construction.
class Permutation {
 public:
  Permutation(std::map<std::string, std::string> mapping, int order);

  static Permutation identity(const std::vector<std::string>& universe);

  const std::map<std::string, std::string>& mapping() const { return mapping_; }
  int order() const { return order_; }

  const std::string& apply(const std::string& x) const;
  Permutation inverse() const;
  bool commutes_with(const Permutation& other) const;

  /// True iff the permutation's domain is exactly the given set of names.
  bool acts_on(const std::vector<std::string>& universe) const;

 private:
  std::map<std::string, std::string> mapping_;
  int order_ = 1;
};

/// A group action presented by generators on a shared universe.  Generators
/// must be bijections on the universe with prime declared orders; when the
/// commutativity flag is set, all generator pairs are checked to commute.
class GeneratedAction {
 public:
  GeneratedAction(std::vector<std::string> universe, std::vector<Permutation> generators,
                  bool commutative);

  const std::vector<std::string>& universe() const { return universe_; }
  const std::vector<Permutation>& generators() const { return generators_; }
  bool commutative() const { return commutative_; }

  /// Partition of the universe into orbits of the generated group, blocks
  /// ordered by first occurrence.
  EquivalencePartition orbits() const;

 private:
  std::vector<std::string> universe_;
  std::vector<Permutation> generators_;
  bool commutative_ = false;
};

/// True iff gamma maps every relation set of X onto itself.  Throws when
/// gamma does not act on universe(X).
bool preserves(const Permutation& gamma, const Structure& x);

/// Averages h0 along the gamma-orbit through a cyclic polymorphism:
///   h(x) = f(h0(x), h0(gamma^-1 x), ..., h0(gamma^-(p-1) x))
/// where p = f.arity.  Requires: h0 valid; f a cyclic polymorphism of
/// h0.target with prime arity; gamma preserving h0.source with order
/// dividing p.  The result is a valid homomorphism, gamma-invariant, and
/// stays invariant under any permutation commuting with gamma that h0 was
/// already invariant under.
Homomorphism symmetrize(const Homomorphism& h0, const Permutation& gamma,
                        const Polymorphism& f);

/// Applies symmetrize once per generator of a commutative action, using the
/// cyclic polymorphism supplied for that generator's order.  The result is
/// invariant under every generator.
Homomorphism make_invariant(const Homomorphism& h0, const GeneratedAction& action,
                            const std::map<int, Polymorphism>& polys_by_order);

/// Disjoint union of cycles C_{p_1}, ..., C_{p_m} for strictly increasing
/// odd primes, with one rotation generator per cycle (acting as the identity
/// on the other cycles).  Vertex (i, j) is named "<p_i>_<j>".
std::pair<Structure, GeneratedAction> schreier_instance(const std::vector<int>& primes);

struct InvariantSearchResult {
  SearchStatus status = SearchStatus::absent;
  std::optional<Homomorphism> witness;
  std::uint64_t nodes = 0;
};

/// Decides whether a homomorphism X -> tmpl exists that is constant on the
/// orbits of the action (equivalently, invariant under every generator), by
/// solving the orbit-quotient instance; a found witness is lifted back to X.
InvariantSearchResult invariant_hom_exists(const Structure& x,
                                           const GeneratedAction& action,
                                           const Structure& tmpl,
                                           const SearchOptions& options = {});

}  // namespace polyhom
