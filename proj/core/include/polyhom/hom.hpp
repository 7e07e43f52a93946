#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "polyhom/structure.hpp"

namespace polyhom {

/// Outcome of a bounded search.  `absent` is only reported after an
/// exhaustive search; running out of node budget yields `unknown`.
enum class SearchStatus { found, absent, unknown };

/// A map between the universes of two structures.  Validity (every relation
/// tuple lands in the corresponding target relation) is checked by
/// is_valid_hom, never assumed.
struct Homomorphism {
  Structure source;
  Structure target;
  std::map<std::string, std::string> map;
};

/// Direct definition check: the map is total on universe(source), lands in
/// universe(target), and maps every relation tuple of the source into the
/// same relation of the target.  Independent of the search machinery.
bool is_valid_hom(const Homomorphism& h);

/// x -> then(first(x)); requires first.target == then.source.
Homomorphism compose(const Homomorphism& first, const Homomorphism& then);

enum class VarOrder {
  fixed,     // instance universe order
  by_degree  // descending constraint occurrences, ties by universe order
};

struct SearchOptions {
  VarOrder var_order = VarOrder::fixed;
  /// Maximum number of value-assignment attempts; 0 means unbounded.
  std::uint64_t node_budget = 0;
  /// Worker count for splitting on the first variable's values.  Budgeted
  /// searches always run sequentially so the absent/unknown frontier is
  /// reproducible; unbudgeted parallel runs return the same witness as the
  /// sequential search.
  unsigned parallel = 1;
};

struct HomSearchResult {
  SearchStatus status = SearchStatus::absent;
  std::optional<Homomorphism> witness;
  std::uint64_t nodes = 0;
};

/// Backtracking search with arc-consistency propagation over positive table
/// constraints (one per instance tuple).  Values are tried in target
/// universe order, so the found witness is the lexicographically first
/// solution under the variable order.  Throws std::invalid_argument when the
/// structures do not share a signature or the target has more than 64
/// elements.
HomSearchResult find_hom(const Structure& instance, const Structure& tmpl,
                         const SearchOptions& options = {});

/// All homomorphisms instance -> tmpl in lexicographic witness order.
/// A nonzero limit truncates the enumeration after that many results.
std::vector<Homomorphism> enumerate_homs(const Structure& instance, const Structure& tmpl,
                                         std::uint64_t limit = 0);

struct FiniteSolvabilityResult {
  /// found: every induced substructure with at most k elements maps to the
  /// template; absent: some does not; unknown: a sub-search ran out of budget
  /// before any definite failure was seen.
  SearchStatus status = SearchStatus::found;
  /// On absent: the first failing subset in size-ascending, then
  /// index-lexicographic order (hence of minimal size).
  std::vector<std::string> failing_subset;
};

/// Checks every subset of universe(instance) of size 1..k.
/// Requires 1 <= k <= |universe(instance)|.
FiniteSolvabilityResult finitely_solvable_up_to(const Structure& instance,
                                                const Structure& tmpl, int k,
                                                const SearchOptions& options = {});

struct HomEquivalenceResult {
  SearchStatus status = SearchStatus::absent;
  std::optional<Homomorphism> forward;   // d -> e
  std::optional<Homomorphism> backward;  // e -> d
};

/// Searches for homomorphisms in both directions between d and e.
HomEquivalenceResult hom_equivalent(const Structure& d, const Structure& e,
                                    const SearchOptions& options = {});

}  // namespace polyhom
