#pragma once

#include <optional>

#include "polyhom/hom.hpp"
#include "polyhom/poly.hpp"

namespace polyhom {

/// A filter on a finite ground set, presented by a base of subsets: the
/// filter consists of every superset of an intersection of base sets, which
/// for a finite base is exactly every superset of the intersection of all of
/// them (the core).  The core must be nonempty so the filter is proper.
class SetFilter {
 public:
  SetFilter(std::vector<std::string> ground, std::vector<std::set<std::string>> base);

  const std::vector<std::string>& ground() const { return ground_; }
  const std::vector<std::set<std::string>>& base() const { return base_; }
  const std::set<std::string>& core() const { return core_; }

  /// A in the filter iff A contains the core; A must be a subset of ground.
  bool contains(const std::set<std::string>& a) const;

 private:
  std::vector<std::string> ground_;
  std::vector<std::set<std::string>> base_;
  std::set<std::string> core_;
};

/// The graph on all functions ground -> {0,1,2} (vertices encoded as strings
/// over "012" following the ground order, enumerated with the first position
/// slowest) with an edge between f and g iff their disagreement set
/// {x : f(x) != g(x)} lies in the filter.  The ground size is capped (the
/// graph has 3^|ground| vertices).
Structure disagreement_graph(const SetFilter& filter, int max_ground = 6);

/// Composes a proper coloring of a disagreement graph with the unique color
/// permutation sending the coloring of each constant function i_X back to i,
/// so the result fixes the three constants.  Requires the coloring to be a
/// valid homomorphism into K3.
Homomorphism normalize_coloring(const Homomorphism& coloring);

/// The family U = {A : c(1_A) = 1} extracted from a normalized coloring:
/// for every subset A of the ground set, the indicator function 1_A is a
/// vertex; A joins the family iff it is colored 1.
struct ExtractedFamily {
  std::vector<std::string> ground;
  std::set<std::set<std::string>> members;
};

ExtractedFamily extract_family(const Homomorphism& coloring,
                               const std::vector<std::string>& ground);

struct UltrafilterCheck {
  bool ok = false;
  /// First failed axiom among: "empty-set", "upward-closure", "intersection",
  /// "filter-containment", "maximality"; empty when ok.
  std::string failed_axiom;
  std::string detail;
};

/// Verifies the ultrafilter axioms for the family over the filter's ground
/// set, including that the family contains the filter.
UltrafilterCheck check_ultrafilter(const ExtractedFamily& family, const SetFilter& filter);

/// Reinterprets a coloring of the disagreement graph over an n-element
/// ground set as an n-ary operation on K3's universe (vertex digits become
/// argument tuples).  Validity as a polymorphism is not implied for general
/// filters; for the filter generated by {ground} it is.
Polymorphism coloring_as_operation(const Homomorphism& coloring,
                                   const std::vector<std::string>& ground);

struct DictatorshipReport {
  int colorings = 0;   // proper colorings of the disagreement graph
  int normalized = 0;  // distinct colorings after normalization
  int violations = 0;  // normalized colorings that are not dictatorships
};

/// Enumerates every proper 3-coloring of the disagreement graph over an
/// n-element ground set with the filter generated by the whole set,
/// normalizes them, and checks each distinct normalized coloring: exactly
/// one essential coordinate, and the extracted family is an ultrafilter
/// containing the filter, principal at that essential coordinate.
/// n is capped at 3 unless allow_large permits 4.
DictatorshipReport dictatorship_check(int n, bool allow_large = false);

}  // namespace polyhom
