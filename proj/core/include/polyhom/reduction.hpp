#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <tuple>
#include <variant>

#include "polyhom/hom.hpp"

namespace polyhom {

/// A variable occurrence inside a pp-definition: z refers to coordinate
/// `coord` (1..n) of argument tuple `tuple_index` (1..k); w refers to
/// existential witness `coord` (1..r).  tuple_index is meaningless for w.
struct VarRef {
  enum class Kind { z, w };
  Kind kind = Kind::z;
  int tuple_index = 0;
  int coord = 0;

  static VarRef z(int s, int j) { return VarRef{Kind::z, s, j}; }
  static VarRef w(int t) { return VarRef{Kind::w, 0, t}; }

  friend bool operator==(const VarRef& a, const VarRef& b) {
    return a.kind == b.kind && a.coord == b.coord &&
           (a.kind == VarRef::Kind::w || a.tuple_index == b.tuple_index);
  }
};

/// One conjunct of a pp-definition: a relation symbol of the base signature
/// applied to variable references, or the distinguished "=" with two args.
struct Atom {
  std::string relation;
  std::vector<VarRef> args;

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.relation == b.relation && a.args == b.args;
  }
};

/// Defining formula of one target symbol R of arity k:
///   (z_1,...,z_k) in R  iff  exists w_1..w_r such that all atoms hold.
struct PPRelationDef {
  int witness_count = 0;
  std::vector<Atom> atoms;
};

/// A pp-power declaration: the target structure E lives on universe
/// (universe(base))^n and each target symbol is defined by a pp-formula over
/// the base.  `base_ref` optionally remembers how the base was named in a
/// file (builtin name or path) for faithful re-serialization.
struct PPPower {
  Structure base;
  int dimension = 1;
  Signature target_signature;
  std::map<std::string, PPRelationDef> defs;
  std::string base_ref;
};

/// Validates indices, arities and def/signature agreement; throws
/// std::invalid_argument naming the offending piece.
void validate_pp(const PPPower& pp);

/// True iff no "=" atom mentions a w variable.
bool is_normalized(const PPPower& pp);

/// Eliminates every "=" atom touching a witness by substituting the equated
/// variable throughout and deleting the atom, iterating to fixpoint; unused
/// witness slots are compacted and counts reduced.  Equalities between two z
/// references are kept.
PPPower normalize_pp(const PPPower& pp);

/// Materializes the target structure E on universe (universe(base))^n by
/// brute-force witness search (the ground-truth oracle; exponential in
/// k*n + r per definition, guarded by `budget` candidate evaluations).
Structure eval_pp_power(const PPPower& pp, std::uint64_t budget = 50'000'000);

/// Identifies one formal witness slot: witness `index` (1..r) of the
/// definition of `relation` applied to the related `tuple` of instance
/// elements.
struct WitnessKey {
  std::string relation;
  Tuple tuple;
  int index = 0;

  friend bool operator<(const WitnessKey& a, const WitnessKey& b) {
    return std::tie(a.relation, a.tuple, a.index) < std::tie(b.relation, b.tuple, b.index);
  }
  friend bool operator==(const WitnessKey& a, const WitnessKey& b) {
    return std::tie(a.relation, a.tuple, a.index) == std::tie(b.relation, b.tuple, b.index);
  }
};

/// Result of compiling an instance X over the target signature into an
/// instance of the base template.
///
/// Element naming: the formal coordinate j of instance element x is "x@j";
/// the formal witness t of a related tuple (x1,..,xk) of R is
/// "w@R(x1,..,xk)@t".  Coordinates merged by equality atoms form one class
/// named after its earliest formal coordinate (instance universe order, then
/// coordinate index); witnesses are always alone in their class.
struct GammaOutput {
  Structure compiled;
  /// Formal coordinate name "x@j" -> its class name in the compiled universe.
  std::map<std::string, std::string> class_of;
  /// Formal witness slot -> its element name in the compiled universe.
  std::map<WitnessKey, std::string> witnesses;
  /// Edges of the equality graph on formal coordinates.
  std::vector<std::pair<std::string, std::string>> equality_graph;
};

/// The reduction compiler: builds formal coordinates and witnesses, installs
/// one compiled tuple per non-equality atom per related instance tuple,
/// merges coordinates connected by equality atoms, and interprets base
/// symbols untouched by every definition as empty.  Requires pp normalized
/// and signature(X) = target signature.  Linear in the instance, never
/// materializes E.
GammaOutput gamma(const Structure& instance, const PPPower& pp);

/// Transfers f: X -> E to a homomorphism gamma(X).compiled -> base.  Classes
/// [x@j] map to coordinate j of f(x); each formal witness maps to the
/// corresponding entry of the lexicographically least witness tuple (in base
/// universe order) for its image tuple, which depends only on that tuple.
/// Rejects f if it is not a valid homomorphism into the pp-power's target.
Homomorphism phi(const Homomorphism& f, const Structure& instance, const PPPower& pp);

/// Transfers g: gamma(X).compiled -> base back to X -> E by reading the
/// class images coordinatewise: psi(g)(x) = (g([x@1]),...,g([x@n])).  The
/// witness images certify every relation tuple, so the result validates
/// against eval_pp_power(pp) (which is materialized for the returned
/// homomorphism's target).
Homomorphism psi(const Homomorphism& g, const Structure& instance, const PPPower& pp);

struct CoverResult {
  /// Subset F of universe(X), in universe order.
  std::vector<std::string> subset;
  /// Valid homomorphism from the induced substructure of gamma(X).compiled
  /// on H to gamma(F).compiled.
  Homomorphism theta;
};

/// For a finite subset H of the compiled universe, produces a finite subset
/// F of X together with a homomorphism from the substructure induced on H
/// into the compilation of F.  Representatives are read off witness names
/// when a tuple contains one, and chosen as the lexicographically least
/// matching related tuple otherwise; F is closed so that coordinates merged
/// in gamma(X) stay merged in gamma(F).  Isolated elements of H map to the
/// first element of gamma(F)'s universe.
CoverResult finite_cover(const Structure& instance, const PPPower& pp,
                         const std::set<std::string>& h);

/// Compiles one (instance, pp) pair up front so that many cover queries can
/// be answered without redoing the compilation.  cover(h) returns exactly
/// what finite_cover(instance, pp, h) returns; sub-compilations of repeated
/// cover subsets are cached.  Safe to query from several threads.
class CoverSolver {
 public:
  CoverSolver(Structure instance, PPPower pp);

  /// The compilation of the full instance, shared by every query.
  const GammaOutput& compilation() const;

  CoverResult cover(const std::set<std::string>& h) const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

/// A serializable reduction between two templates: instances over the
/// "outer" signature compile to instances of the "inner" template, with
/// solution transfer in both directions.  Stored as data (pp-power or
/// homomorphism pair or a chain), not closures.
class ReductionBundle {
 public:
  struct PPData {
    PPPower pp;
  };
  struct HomEquivData {
    Homomorphism into_outer;   // inner template -> outer template
    Homomorphism into_inner;   // outer template -> inner template
  };
  struct ComposeData {
    std::shared_ptr<const ReductionBundle> first;   // outer -> middle
    std::shared_ptr<const ReductionBundle> second;  // middle -> inner
  };

  static ReductionBundle from_pp_power(PPPower pp);
  static ReductionBundle from_hom_equivalence(Homomorphism into_outer,
                                              Homomorphism into_inner);
  static ReductionBundle composed(ReductionBundle first, ReductionBundle second);

  /// Signature of the instances this bundle accepts.
  const Signature& instance_signature() const { return instance_signature_; }
  /// Signature of the compiled instances it emits.
  const Signature& compiled_signature() const { return compiled_signature_; }

  Structure apply_gamma(const Structure& instance) const;
  /// f: instance -> outer template   =>   compiled instance -> inner template
  Homomorphism apply_phi(const Homomorphism& f, const Structure& instance) const;
  /// g: compiled instance -> inner template   =>   instance -> outer template
  Homomorphism apply_psi(const Homomorphism& g, const Structure& instance) const;

  const std::variant<PPData, HomEquivData, ComposeData>& data() const { return data_; }

 private:
  ReductionBundle(std::variant<PPData, HomEquivData, ComposeData> data,
                  Signature instance_sig, Signature compiled_sig);

  std::variant<PPData, HomEquivData, ComposeData> data_;
  Signature instance_signature_;
  Signature compiled_signature_;
};

/// Reduction bundle for a homomorphic equivalence D ~ E: instances pass
/// through unchanged, solutions compose with the appropriate witness
/// (Gamma = identity, Phi = theta2 after f, Psi = theta1 after g, where
/// theta1 = into_outer: D -> E and theta2 = into_inner: E -> D).
ReductionBundle hom_equiv_reduction(Homomorphism theta1, Homomorphism theta2);

/// Chains two bundles: Gamma = Gamma2 after Gamma1, Phi = Phi2 after Phi1,
/// Psi = Psi1 after Psi2.  The first bundle's compiled signature must equal
/// the second's instance signature.
ReductionBundle compose_reductions(ReductionBundle b1, ReductionBundle b2);

/// Formal coordinate / witness naming used by gamma (exposed for tooling).
std::string formal_coordinate_name(const std::string& element, int coord);
std::string formal_witness_name(const std::string& relation, const Tuple& tuple, int index);

}  // namespace polyhom
