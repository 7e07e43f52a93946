#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace polyhom {

/// A relation symbol: a name together with a positive arity.
struct Symbol {
  std::string name;
  int arity = 0;

  friend bool operator==(const Symbol& a, const Symbol& b) {
    return a.name == b.name && a.arity == b.arity;
  }
};

/// A finite relational signature.  Symbol names are unique; the declaration
/// order is kept for deterministic iteration, but two signatures compare
/// equal whenever they declare the same symbols with the same arities.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<Symbol> symbols);

  const std::vector<Symbol>& symbols() const { return symbols_; }
  bool has(const std::string& name) const { return arity_.count(name) != 0; }
  /// Arity of a declared symbol; throws std::invalid_argument if unknown.
  int arity_of(const std::string& name) const;

  friend bool operator==(const Signature& a, const Signature& b) {
    return a.arity_ == b.arity_;
  }

 private:
  std::vector<Symbol> symbols_;
  std::map<std::string, int> arity_;
};

using Tuple = std::vector<std::string>;
/// Tuples are kept lexicographically sorted so every traversal of a relation
/// is deterministic.
using TupleSet = std::set<Tuple>;

/// A finite relational structure: an ordered universe of named elements plus
/// one tuple set per signature symbol.  The universe order is the structure's
/// canonical element order; all search and enumeration routines follow it.
///
/// Structures are immutable values: every operation returns a new structure.
class Structure {
 public:
  /// The empty structure: no symbols, no elements.
  Structure() = default;
  Structure(Signature sig, std::vector<std::string> universe,
            std::map<std::string, TupleSet> relations);

  const Signature& signature() const { return sig_; }
  const std::vector<std::string>& universe() const { return universe_; }
  std::size_t size() const { return universe_.size(); }

  bool has_element(const std::string& e) const { return index_.count(e) != 0; }
  /// Position of an element in the universe order; throws if absent.
  int index_of(const std::string& e) const;

  const TupleSet& relation(const std::string& symbol) const;
  const std::map<std::string, TupleSet>& relations() const { return relations_; }

  friend bool operator==(const Structure& a, const Structure& b) {
    return a.sig_ == b.sig_ && a.universe_ == b.universe_ &&
           a.relations_ == b.relations_;
  }

 private:
  Signature sig_;
  std::vector<std::string> universe_;
  std::map<std::string, int> index_;
  std::map<std::string, TupleSet> relations_;
};

/// A partition of a structure's universe into nonempty disjoint blocks.
struct EquivalencePartition {
  std::vector<std::vector<std::string>> blocks;
};

/// Joins tuple entries with ',' — the canonical element name in a power.
std::string join_tuple(const Tuple& t);
/// Splits a joined name back into its entries.
Tuple split_element(const std::string& e);

/// The categorical power D^n: elements are n-tuples over universe(base)
/// (named by join_tuple, enumerated in odometer order with the first
/// coordinate slowest) and a tuple of n-tuples is related iff it is related
/// coordinatewise in the base.  Element names containing ',' are rejected,
/// since the joined names could not be split apart again.
Structure power(const Structure& base, int exponent);

/// Restriction of s to the elements of `keep` (which must all exist),
/// preserving the universe order and keeping only tuples inside `keep`.
Structure induced_substructure(const Structure& s, const std::set<std::string>& keep);

/// Quotient by an equivalence partition.  Each block is named after its
/// earliest member in the universe order, blocks are ordered by that member,
/// and relations are the images of the original tuples.  The partition must
/// cover the universe exactly once.
Structure quotient(const Structure& s, const EquivalencePartition& partition);

/// Checks that `bijection` is a bijection universe(a) -> universe(b) mapping
/// every relation of a onto the corresponding relation of b.
bool isomorphic_via(const Structure& a, const Structure& b,
                    const std::map<std::string, std::string>& bijection);

/// Built-in templates addressable by name:
///   K2, K3, Kn:<n>   — complete graphs (binary symbol E, no loops)
///   Cn:<n>           — undirected n-cycles (binary symbol E)
///   3LIN2            — domain {0,1} with ternary S0 = {x+y+z = 0 (mod 2)}
///                      and S1 = {x+y+z = 1 (mod 2)}
/// Returns std::nullopt for unrecognized names.
std::optional<Structure> builtin_structure(const std::string& name);

}  // namespace polyhom
