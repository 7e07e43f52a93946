#include "polyhom/reduction.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <stdexcept>

namespace polyhom {

std::string formal_coordinate_name(const std::string& element, int coord) {
  return element + "@" + std::to_string(coord);
}

std::string formal_witness_name(const std::string& relation, const Tuple& tuple,
                                int index) {
  return "w@" + relation + "(" + join_tuple(tuple) + ")@" + std::to_string(index);
}

namespace {

std::string atom_context(const std::string& symbol, std::size_t atom_index) {
  return "def '" + symbol + "' atom " + std::to_string(atom_index + 1);
}

}  // namespace

void validate_pp(const PPPower& pp) {
  if (pp.dimension < 1)
    throw std::invalid_argument("pp-power: dimension must be >= 1, got " +
                                std::to_string(pp.dimension));
  for (const std::string& e : pp.base.universe()) {
    if (e.find(',') != std::string::npos)
      throw std::invalid_argument("pp-power: base element '" + e +
                                  "' contains the reserved delimiter ','");
  }
  for (const Symbol& sym : pp.target_signature.symbols()) {
    if (!pp.defs.count(sym.name))
      throw std::invalid_argument("pp-power: target symbol '" + sym.name +
                                  "' has no definition");
  }
  for (const auto& [symbol, def] : pp.defs) {
    if (!pp.target_signature.has(symbol))
      throw std::invalid_argument("pp-power: def '" + symbol +
                                  "' is not a target signature symbol");
    const int k = pp.target_signature.arity_of(symbol);
    if (def.witness_count < 0)
      throw std::invalid_argument("pp-power: def '" + symbol +
                                  "' has negative witness count");
    for (std::size_t ai = 0; ai < def.atoms.size(); ++ai) {
      const Atom& atom = def.atoms[ai];
      int arity;
      if (atom.relation == "=") {
        arity = 2;
      } else if (pp.base.signature().has(atom.relation)) {
        arity = pp.base.signature().arity_of(atom.relation);
      } else {
        throw std::invalid_argument("pp-power: " + atom_context(symbol, ai) +
                                    " uses unknown relation '" + atom.relation + "'");
      }
      if (static_cast<int>(atom.args.size()) != arity)
        throw std::invalid_argument("pp-power: " + atom_context(symbol, ai) + " has " +
                                    std::to_string(atom.args.size()) +
                                    " args, expected " + std::to_string(arity));
      for (const VarRef& ref : atom.args) {
        if (ref.kind == VarRef::Kind::z) {
          if (ref.tuple_index < 1 || ref.tuple_index > k)
            throw std::invalid_argument("pp-power: " + atom_context(symbol, ai) +
                                        ": z tuple index " +
                                        std::to_string(ref.tuple_index) +
                                        " outside 1.." + std::to_string(k));
          if (ref.coord < 1 || ref.coord > pp.dimension)
            throw std::invalid_argument("pp-power: " + atom_context(symbol, ai) +
                                        ": z coordinate " + std::to_string(ref.coord) +
                                        " outside 1.." + std::to_string(pp.dimension));
        } else {
          if (ref.coord < 1 || ref.coord > def.witness_count)
            throw std::invalid_argument("pp-power: " + atom_context(symbol, ai) +
                                        ": witness index " + std::to_string(ref.coord) +
                                        " outside 1.." +
                                        std::to_string(def.witness_count));
        }
      }
    }
  }
}

bool is_normalized(const PPPower& pp) {
  for (const auto& [symbol, def] : pp.defs) {
    for (const Atom& atom : def.atoms) {
      if (atom.relation != "=") continue;
      for (const VarRef& ref : atom.args)
        if (ref.kind == VarRef::Kind::w) return false;
    }
  }
  return true;
}

PPPower normalize_pp(const PPPower& pp) {
  validate_pp(pp);
  PPPower out = pp;
  for (auto& [symbol, def] : out.defs) {
    std::set<int> eliminated;
    // Repeatedly erase one equality touching a witness, substituting the
    // witness by the other side everywhere.  Only identifications happen, so
    // the loop terminates once every witness-touching equality is gone.
    while (true) {
      std::size_t hit = def.atoms.size();
      for (std::size_t ai = 0; ai < def.atoms.size(); ++ai) {
        const Atom& atom = def.atoms[ai];
        if (atom.relation == "=" && (atom.args[0].kind == VarRef::Kind::w ||
                                     atom.args[1].kind == VarRef::Kind::w)) {
          hit = ai;
          break;
        }
      }
      if (hit == def.atoms.size()) break;
      Atom atom = def.atoms[hit];
      def.atoms.erase(def.atoms.begin() + hit);
      VarRef from = atom.args[0], to = atom.args[1];
      if (from.kind != VarRef::Kind::w) std::swap(from, to);
      // `from` is a witness.  If both sides are witnesses, keep the smaller.
      if (to.kind == VarRef::Kind::w && to.coord > from.coord) std::swap(from, to);
      if (from == to) continue;  // w(t) = w(t): vacuous
      eliminated.insert(from.coord);
      for (Atom& a : def.atoms)
        for (VarRef& ref : a.args)
          if (ref.kind == VarRef::Kind::w && ref.coord == from.coord) ref = to;
    }
    // Compact the surviving witness indices, preserving their order.
    std::map<int, int> remap;
    int next = 1;
    for (int t = 1; t <= def.witness_count; ++t)
      if (!eliminated.count(t)) remap[t] = next++;
    for (Atom& a : def.atoms)
      for (VarRef& ref : a.args)
        if (ref.kind == VarRef::Kind::w) ref.coord = remap.at(ref.coord);
    def.witness_count = next - 1;
  }
  return out;
}

namespace {

// Shared atom-evaluation plumbing.  Coordinates of the k argument tuples are
// laid out as flat slots s*n + j (0-based); witnesses follow in their own
// array.  Values are base-universe indices.
struct ResolvedAtom {
  bool equality = false;
  const TupleSet* table = nullptr;  // for non-equality atoms
  struct Slot {
    bool witness = false;
    int index = 0;  // z: flat coordinate slot; w: witness slot (0-based)
  };
  std::vector<Slot> slots;
};

ResolvedAtom resolve_atom(const Atom& atom, const PPPower& pp) {
  ResolvedAtom out;
  out.equality = atom.relation == "=";
  if (!out.equality) out.table = &pp.base.relation(atom.relation);
  for (const VarRef& ref : atom.args) {
    ResolvedAtom::Slot slot;
    if (ref.kind == VarRef::Kind::z) {
      slot.witness = false;
      slot.index = (ref.tuple_index - 1) * pp.dimension + (ref.coord - 1);
    } else {
      slot.witness = true;
      slot.index = ref.coord - 1;
    }
    out.slots.push_back(slot);
  }
  return out;
}

bool atom_holds(const ResolvedAtom& atom, const PPPower& pp,
                const std::vector<int>& coords, const std::vector<int>& witness) {
  auto value_of = [&](const ResolvedAtom::Slot& slot) {
    return slot.witness ? witness[slot.index] : coords[slot.index];
  };
  if (atom.equality) return value_of(atom.slots[0]) == value_of(atom.slots[1]);
  Tuple t(atom.slots.size());
  for (std::size_t i = 0; i < atom.slots.size(); ++i)
    t[i] = pp.base.universe()[value_of(atom.slots[i])];
  return atom.table->count(t) != 0;
}

// Lexicographically least witness assignment (base universe order) under
// which every atom holds for the given flat coordinates, or nullopt.
std::optional<std::vector<int>> least_witness(const std::vector<ResolvedAtom>& atoms,
                                              const PPPower& pp, int witness_count,
                                              const std::vector<int>& coords,
                                              std::uint64_t* budget) {
  const int dsize = static_cast<int>(pp.base.size());
  std::vector<int> witness(witness_count, 0);
  if (witness_count > 0 && dsize == 0) return std::nullopt;
  while (true) {
    if (budget) {
      if (*budget == 0)
        throw std::runtime_error("eval_pp_power: candidate budget exhausted");
      --*budget;
    }
    bool ok = true;
    for (const ResolvedAtom& atom : atoms) {
      if (!atom_holds(atom, pp, coords, witness)) {
        ok = false;
        break;
      }
    }
    if (ok) return witness;
    int pos = witness_count - 1;
    while (pos >= 0 && ++witness[pos] == dsize) witness[pos--] = 0;
    if (pos < 0) return std::nullopt;
  }
}

}  // namespace

Structure eval_pp_power(const PPPower& pp, std::uint64_t budget) {
  validate_pp(pp);
  const Structure universe_only(pp.base.signature(), pp.base.universe(), {});
  const Structure shell = power(universe_only, pp.dimension);

  std::map<std::string, TupleSet> relations;
  const int n = pp.dimension;
  const int dsize = static_cast<int>(pp.base.size());
  for (const Symbol& sym : pp.target_signature.symbols()) {
    const PPRelationDef& def = pp.defs.at(sym.name);
    std::vector<ResolvedAtom> atoms;
    for (const Atom& a : def.atoms) atoms.push_back(resolve_atom(a, pp));

    TupleSet& out = relations[sym.name];
    if (dsize == 0) continue;
    const int slots = sym.arity * n;
    std::vector<int> coords(slots, 0);
    while (true) {
      if (least_witness(atoms, pp, def.witness_count, coords, &budget)) {
        Tuple t(sym.arity);
        for (int s = 0; s < sym.arity; ++s) {
          Tuple part(n);
          for (int j = 0; j < n; ++j) part[j] = pp.base.universe()[coords[s * n + j]];
          t[s] = join_tuple(part);
        }
        out.insert(std::move(t));
      }
      int pos = slots - 1;
      while (pos >= 0 && ++coords[pos] == dsize) coords[pos--] = 0;
      if (pos < 0) break;
    }
  }
  return Structure(pp.target_signature, shell.universe(), std::move(relations));
}

namespace {

// Internal compilation state shared by gamma and finite_cover.
struct Compilation {
  GammaOutput out;
  // Formal coordinates in generation order: element index major, coord minor.
  std::vector<std::string> coord_names;
  std::map<std::string, int> coord_id;              // name -> id
  std::vector<std::pair<int, int>> coord_meta;      // id -> (element idx, coord 1..n)
  std::vector<int> dsu;
  // For every compiled relation tuple, the (symbol, instance tuple, atom
  // index) combinations that install it.
  struct Generator {
    std::string relation;  // target symbol R
    Tuple tuple;           // related instance tuple
    std::size_t atom;      // index into the def's atoms
  };
  std::map<std::pair<std::string, Tuple>, std::vector<Generator>> tuple_generators;
  // First generator of each equality edge, keyed by ordered coord-id pair.
  std::map<std::pair<int, int>, std::pair<std::string, Tuple>> edge_generators;
  // Undirected equality adjacency on coord ids.
  std::map<int, std::vector<int>> adjacency;

  int find(int v) {
    while (dsu[v] != v) v = dsu[v] = dsu[dsu[v]];
    return v;
  }
  void unite(int a, int b) { dsu[find(a)] = find(b); }
};

Compilation compile_gamma(const Structure& instance, const PPPower& pp) {
  validate_pp(pp);
  if (!is_normalized(pp))
    throw std::invalid_argument(
        "gamma: pp-power has equality atoms touching witnesses; normalize first");
  if (!(instance.signature() == pp.target_signature))
    throw std::invalid_argument(
        "gamma: instance signature differs from the pp-power target signature");

  Compilation c;
  const int n = pp.dimension;

  for (std::size_t xi = 0; xi < instance.universe().size(); ++xi) {
    for (int j = 1; j <= n; ++j) {
      const std::string name = formal_coordinate_name(instance.universe()[xi], j);
      c.coord_id[name] = static_cast<int>(c.coord_names.size());
      c.coord_names.push_back(name);
      c.coord_meta.emplace_back(static_cast<int>(xi), j);
    }
  }
  c.dsu.resize(c.coord_names.size());
  for (std::size_t i = 0; i < c.dsu.size(); ++i) c.dsu[i] = static_cast<int>(i);

  auto coord_of = [&](const Tuple& tuple, const VarRef& ref) {
    return c.coord_id.at(formal_coordinate_name(tuple[ref.tuple_index - 1], ref.coord));
  };

  // Pass 1: equality atoms build the equality graph and merge coordinates.
  for (const auto& [symbol, tuples] : instance.relations()) {
    const PPRelationDef& def = pp.defs.at(symbol);
    for (const Tuple& tuple : tuples) {
      for (const Atom& atom : def.atoms) {
        if (atom.relation != "=") continue;
        const int u = coord_of(tuple, atom.args[0]);
        const int v = coord_of(tuple, atom.args[1]);
        c.out.equality_graph.emplace_back(c.coord_names[u], c.coord_names[v]);
        const std::pair<int, int> key = std::minmax(u, v);
        if (!c.edge_generators.count(key))
          c.edge_generators.emplace(key, std::make_pair(symbol, tuple));
        if (u != v) {
          c.adjacency[u].push_back(v);
          c.adjacency[v].push_back(u);
          c.unite(u, v);
        }
      }
    }
  }

  // Classes: every component is named after its earliest coordinate.
  std::map<int, int> least_of_root;
  for (int id = 0; id < static_cast<int>(c.coord_names.size()); ++id) {
    const int root = c.find(id);
    if (!least_of_root.count(root)) least_of_root[root] = id;
  }
  std::vector<int> class_leads;  // earliest coord id per class, ascending
  for (int id = 0; id < static_cast<int>(c.coord_names.size()); ++id) {
    if (least_of_root.at(c.find(id)) == id) class_leads.push_back(id);
    c.out.class_of[c.coord_names[id]] = c.coord_names[least_of_root.at(c.find(id))];
  }

  // Universe: classes first (by earliest coordinate), then witnesses in
  // generation order (symbol, tuple, index).
  std::vector<std::string> universe;
  for (int id : class_leads) universe.push_back(c.coord_names[id]);
  for (const auto& [symbol, tuples] : instance.relations()) {
    const PPRelationDef& def = pp.defs.at(symbol);
    for (const Tuple& tuple : tuples) {
      for (int t = 1; t <= def.witness_count; ++t) {
        const std::string name = formal_witness_name(symbol, tuple, t);
        c.out.witnesses[WitnessKey{symbol, tuple, t}] = name;
        universe.push_back(name);
      }
    }
  }

  // Pass 2: non-equality atoms install compiled tuples.
  std::map<std::string, TupleSet> relations;
  for (const auto& [symbol, tuples] : instance.relations()) {
    const PPRelationDef& def = pp.defs.at(symbol);
    for (const Tuple& tuple : tuples) {
      for (std::size_t ai = 0; ai < def.atoms.size(); ++ai) {
        const Atom& atom = def.atoms[ai];
        if (atom.relation == "=") continue;
        Tuple installed(atom.args.size());
        for (std::size_t q = 0; q < atom.args.size(); ++q) {
          const VarRef& ref = atom.args[q];
          installed[q] = ref.kind == VarRef::Kind::z
                             ? c.out.class_of.at(
                                   formal_coordinate_name(tuple[ref.tuple_index - 1],
                                                          ref.coord))
                             : formal_witness_name(symbol, tuple, ref.coord);
        }
        c.tuple_generators[{atom.relation, installed}].push_back(
            Compilation::Generator{symbol, tuple, ai});
        relations[atom.relation].insert(std::move(installed));
      }
    }
  }

  c.out.compiled =
      Structure(pp.base.signature(), std::move(universe), std::move(relations));
  return c;
}

}  // namespace

GammaOutput gamma(const Structure& instance, const PPPower& pp) {
  return compile_gamma(instance, pp).out;
}

namespace {

// Coordinates of an E-element under f, as base universe indices; throws when
// the value is not a well-formed element of (universe(base))^n.
std::vector<int> split_coords(const std::string& value, const PPPower& pp,
                              const std::string& element) {
  const Tuple parts = split_element(value);
  if (static_cast<int>(parts.size()) != pp.dimension)
    throw std::invalid_argument("phi: f(" + element + ") = '" + value + "' is not a " +
                                std::to_string(pp.dimension) + "-coordinate element");
  std::vector<int> out(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!pp.base.has_element(parts[i]))
      throw std::invalid_argument("phi: f(" + element + ") coordinate '" + parts[i] +
                                  "' is not a base element");
    out[i] = pp.base.index_of(parts[i]);
  }
  return out;
}

}  // namespace

Homomorphism phi(const Homomorphism& f, const Structure& instance, const PPPower& pp) {
  const Compilation c = compile_gamma(instance, pp);
  const int n = pp.dimension;

  if (!(f.source == instance))
    throw std::invalid_argument("phi: f's source is not the given instance");
  std::map<std::string, std::vector<int>> image_coords;
  for (const std::string& x : instance.universe()) {
    auto it = f.map.find(x);
    if (it == f.map.end())
      throw std::invalid_argument("phi: f has no value for element '" + x + "'");
    image_coords[x] = split_coords(it->second, pp, x);
  }

  // Validate f tuple-by-tuple and pick each related tuple's canonical
  // witness: the lexicographically least assignment, which depends only on
  // the image tuple, so it is memoized per (symbol, image tuple).
  std::map<std::string, std::string> map;
  std::map<std::pair<std::string, Tuple>, std::vector<int>> witness_cache;
  for (const auto& [symbol, tuples] : instance.relations()) {
    const PPRelationDef& def = pp.defs.at(symbol);
    std::vector<ResolvedAtom> atoms;
    for (const Atom& a : def.atoms) atoms.push_back(resolve_atom(a, pp));
    for (const Tuple& tuple : tuples) {
      std::vector<int> coords(tuple.size() * n);
      Tuple image(tuple.size());
      for (std::size_t s = 0; s < tuple.size(); ++s) {
        const std::vector<int>& xc = image_coords.at(tuple[s]);
        image[s] = f.map.at(tuple[s]);
        for (int j = 0; j < n; ++j) coords[s * n + j] = xc[j];
      }
      auto cached = witness_cache.find({symbol, image});
      if (cached == witness_cache.end()) {
        std::optional<std::vector<int>> witness =
            least_witness(atoms, pp, def.witness_count, coords, nullptr);
        if (!witness)
          throw std::invalid_argument("phi: f maps the '" + symbol + "' tuple (" +
                                      join_tuple(tuple) +
                                      ") outside the defined relation");
        cached = witness_cache.emplace(std::make_pair(symbol, image), *witness).first;
      }
      for (int t = 1; t <= def.witness_count; ++t)
        map[formal_witness_name(symbol, tuple, t)] =
            pp.base.universe()[cached->second[t - 1]];
    }
  }

  // Classes read off the image coordinates of any member (all members agree:
  // merges only happen along equality atoms, revalidated above).
  for (const auto& [coord, cls] : c.out.class_of) {
    if (map.count(cls)) continue;
    (void)coord;
    const int lead = c.coord_id.at(cls);
    const auto [xi, j] = c.coord_meta[lead];
    map[cls] = pp.base.universe()[image_coords.at(instance.universe()[xi])[j - 1]];
  }

  Homomorphism result{c.out.compiled, pp.base, std::move(map)};
  if (!is_valid_hom(result))
    throw std::logic_error("phi: transfer produced an invalid homomorphism");
  return result;
}

Homomorphism psi(const Homomorphism& g, const Structure& instance, const PPPower& pp) {
  const Compilation c = compile_gamma(instance, pp);
  if (!(g.source == c.out.compiled))
    throw std::invalid_argument("psi: g's source is not the compiled instance");
  if (!(g.target == pp.base))
    throw std::invalid_argument("psi: g's target is not the pp-power base");
  if (!is_valid_hom(g))
    throw std::invalid_argument("psi: g is not a valid homomorphism");

  std::map<std::string, std::string> map;
  for (const std::string& x : instance.universe()) {
    Tuple coords(pp.dimension);
    for (int j = 1; j <= pp.dimension; ++j)
      coords[j - 1] = g.map.at(c.out.class_of.at(formal_coordinate_name(x, j)));
    map[x] = join_tuple(coords);
  }

  Homomorphism result{instance, eval_pp_power(pp), std::move(map)};
  if (!is_valid_hom(result))
    throw std::logic_error("psi: transfer produced an invalid homomorphism");
  return result;
}

struct CoverSolver::State {
  Structure instance;
  PPPower pp;
  Compilation c;
  std::vector<int> root;  // flattened equality-class root per coordinate id
  std::map<std::string, WitnessKey> witness_of;
  mutable std::mutex cache_mutex;
  mutable std::map<std::set<std::string>, std::shared_ptr<const GammaOutput>>
      subcompile_cache;
};

CoverSolver::CoverSolver(Structure instance, PPPower pp)
    : state_(std::make_shared<State>()) {
  state_->instance = std::move(instance);
  state_->pp = std::move(pp);
  state_->c = compile_gamma(state_->instance, state_->pp);
  state_->root.resize(state_->c.dsu.size());
  for (std::size_t i = 0; i < state_->root.size(); ++i)
    state_->root[i] = state_->c.find(static_cast<int>(i));
  for (const auto& [key, name] : state_->c.out.witnesses)
    state_->witness_of.emplace(name, key);
}

const GammaOutput& CoverSolver::compilation() const { return state_->c.out; }

CoverResult CoverSolver::cover(const std::set<std::string>& h) const {
  const Structure& instance = state_->instance;
  const PPPower& pp = state_->pp;
  const Compilation& c = state_->c;
  const std::map<std::string, WitnessKey>& witness_of = state_->witness_of;
  for (const std::string& u : h) {
    if (!c.out.compiled.has_element(u))
      throw std::invalid_argument("finite_cover: '" + u +
                                  "' is not an element of the compiled instance");
  }
  const Structure h_bar = induced_substructure(c.out.compiled, h);

  std::set<std::string> f_elements;
  std::set<int> f_coords;  // coordinate ids whose elements joined F
  // Image plan per H element: either "the witness itself" or a formal
  // coordinate (of an element put into F) whose gamma(F)-class is the image.
  struct Plan {
    bool witness = false;
    std::string coordinate;  // formal coordinate name when !witness
  };
  std::map<std::string, Plan> plans;

  auto add_to_f = [&](const std::string& element) {
    f_elements.insert(element);
    const int base = instance.index_of(element) * pp.dimension;
    for (int j = 0; j < pp.dimension; ++j) f_coords.insert(base + j);
  };

  // Step 1: realize every H-bar tuple.  A tuple containing a witness name
  // pins down its generating instance tuple exactly; otherwise the
  // lexicographically least matching related tuple is chosen.
  for (const auto& [alpha, tuples] : h_bar.relations()) {
    for (const Tuple& tau : tuples) {
      const auto& candidates = c.tuple_generators.at({alpha, tau});
      Compilation::Generator chosen = candidates.front();
      bool has_witness_entry = false;
      for (const std::string& entry : tau) {
        auto wit = witness_of.find(entry);
        if (wit == witness_of.end()) continue;
        has_witness_entry = true;
        for (const auto& cand : candidates) {
          if (cand.relation == wit->second.relation && cand.tuple == wit->second.tuple) {
            chosen = cand;
            break;
          }
        }
        break;
      }
      const PPRelationDef& def = pp.defs.at(chosen.relation);
      const Atom& atom = def.atoms[chosen.atom];
      if (!has_witness_entry) {
        // No witness entry (so the generating atom is witness-free): scan
        // R^X in order for the least tuple whose class-resolved atom
        // arguments reproduce tau.
        for (const Tuple& candidate : instance.relation(chosen.relation)) {
          bool matches = true;
          for (std::size_t q = 0; q < atom.args.size() && matches; ++q) {
            const VarRef& ref = atom.args[q];
            matches = ref.kind == VarRef::Kind::z &&
                      c.out.class_of.at(formal_coordinate_name(
                          candidate[ref.tuple_index - 1], ref.coord)) == tau[q];
          }
          if (matches) {
            chosen.tuple = candidate;
            break;
          }
        }
      }
      for (const std::string& entry : chosen.tuple) add_to_f(entry);
      for (std::size_t q = 0; q < atom.args.size(); ++q) {
        const VarRef& ref = atom.args[q];
        if (plans.count(tau[q])) continue;
        Plan plan;
        if (ref.kind == VarRef::Kind::w) {
          plan.witness = true;
        } else {
          plan.coordinate =
              formal_coordinate_name(chosen.tuple[ref.tuple_index - 1], ref.coord);
        }
        plans.emplace(tau[q], std::move(plan));
      }
    }
  }

  // Step 2: isolated H elements only need gamma(F) to be nonempty.
  for (const std::string& u : h_bar.universe()) {
    if (plans.count(u)) continue;
    auto wit = witness_of.find(u);
    if (wit != witness_of.end())
      add_to_f(wit->second.tuple.front());
    else
      add_to_f(instance.universe()[c.coord_meta[c.coord_id.at(u)].first]);
  }

  // Step 3: close F so coordinates merged in gamma(X) stay merged in
  // gamma(F): connect the F-coordinates of each class through the equality
  // graph and realize every edge on the connecting paths by adding its
  // generating tuple to F.
  {
    std::map<int, std::vector<int>> members_by_root;
    for (int id : f_coords)
      members_by_root[state_->root[static_cast<std::size_t>(id)]].push_back(id);
    std::set<std::pair<int, int>> realized;
    for (const auto& [root, members] : members_by_root) {
      if (members.size() < 2) continue;
      const int origin = *std::min_element(members.begin(), members.end());
      std::map<int, int> parent;
      parent[origin] = origin;
      std::deque<int> queue{origin};
      while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        auto adj = c.adjacency.find(v);
        if (adj == c.adjacency.end()) continue;
        for (int w : adj->second) {
          if (parent.count(w)) continue;
          parent[w] = v;
          queue.push_back(w);
        }
      }
      for (int member : members) {
        int v = member;
        while (v != origin) {
          const int p = parent.at(v);
          const std::pair<int, int> key = std::minmax(v, p);
          if (realized.insert(key).second) {
            const auto& [symbol, tuple] = c.edge_generators.at(key);
            (void)symbol;
            for (const std::string& entry : tuple) add_to_f(entry);
          }
          v = p;
        }
      }
    }
  }

  // Compile the cover and assemble theta.  Identical cover subsets recur
  // across queries, so their sub-compilations are cached.
  std::shared_ptr<const GammaOutput> gf;
  {
    std::lock_guard<std::mutex> lock(state_->cache_mutex);
    auto cached = state_->subcompile_cache.find(f_elements);
    if (cached != state_->subcompile_cache.end()) gf = cached->second;
  }
  if (!gf) {
    const Structure f_structure = induced_substructure(instance, f_elements);
    gf = std::make_shared<const GammaOutput>(gamma(f_structure, pp));
    std::lock_guard<std::mutex> lock(state_->cache_mutex);
    state_->subcompile_cache.emplace(f_elements, gf);
  }

  std::map<std::string, std::string> theta;
  for (const std::string& u : h_bar.universe()) {
    auto plan = plans.find(u);
    if (plan == plans.end()) {
      theta[u] = gf->compiled.universe().front();
    } else if (plan->second.witness) {
      theta[u] = u;
    } else {
      theta[u] = gf->class_of.at(plan->second.coordinate);
    }
  }

  CoverResult result;
  for (const std::string& e : instance.universe())
    if (f_elements.count(e)) result.subset.push_back(e);
  result.theta = Homomorphism{h_bar, gf->compiled, std::move(theta)};
  if (!is_valid_hom(result.theta))
    throw std::logic_error("finite_cover: theta failed homomorphism validation");
  return result;
}

CoverResult finite_cover(const Structure& instance, const PPPower& pp,
                         const std::set<std::string>& h) {
  return CoverSolver(instance, pp).cover(h);
}

// --- Reduction bundles -------------------------------------------------------

ReductionBundle::ReductionBundle(std::variant<PPData, HomEquivData, ComposeData> data,
                                 Signature instance_sig, Signature compiled_sig)
    : data_(std::move(data)),
      instance_signature_(std::move(instance_sig)),
      compiled_signature_(std::move(compiled_sig)) {}

ReductionBundle ReductionBundle::from_pp_power(PPPower pp) {
  validate_pp(pp);
  PPPower normalized = normalize_pp(pp);
  Signature instance_sig = normalized.target_signature;
  Signature compiled_sig = normalized.base.signature();
  return ReductionBundle(PPData{std::move(normalized)}, std::move(instance_sig),
                         std::move(compiled_sig));
}

ReductionBundle ReductionBundle::from_hom_equivalence(Homomorphism into_outer,
                                                      Homomorphism into_inner) {
  if (!is_valid_hom(into_outer))
    throw std::invalid_argument("hom_equiv_reduction: theta1 is not a homomorphism");
  if (!is_valid_hom(into_inner))
    throw std::invalid_argument("hom_equiv_reduction: theta2 is not a homomorphism");
  if (!(into_outer.source == into_inner.target) ||
      !(into_outer.target == into_inner.source))
    throw std::invalid_argument(
        "hom_equiv_reduction: theta1 and theta2 do not connect the same two templates");
  Signature sig = into_inner.source.signature();
  Signature compiled_sig = into_inner.target.signature();
  return ReductionBundle(HomEquivData{std::move(into_outer), std::move(into_inner)},
                         std::move(sig), std::move(compiled_sig));
}

ReductionBundle ReductionBundle::composed(ReductionBundle first, ReductionBundle second) {
  if (!(first.compiled_signature() == second.instance_signature()))
    throw std::invalid_argument("compose_reductions: signatures do not chain");
  Signature instance_sig = first.instance_signature();
  Signature compiled_sig = second.compiled_signature();
  ComposeData data{std::make_shared<const ReductionBundle>(std::move(first)),
                   std::make_shared<const ReductionBundle>(std::move(second))};
  return ReductionBundle(std::move(data), std::move(instance_sig),
                         std::move(compiled_sig));
}

Structure ReductionBundle::apply_gamma(const Structure& instance) const {
  if (const auto* pp = std::get_if<PPData>(&data_)) return gamma(instance, pp->pp).compiled;
  if (const auto* he = std::get_if<HomEquivData>(&data_)) {
    if (!(instance.signature() == he->into_inner.source.signature()))
      throw std::invalid_argument("apply_gamma: instance signature mismatch");
    return instance;
  }
  const auto& chain = std::get<ComposeData>(data_);
  return chain.second->apply_gamma(chain.first->apply_gamma(instance));
}

Homomorphism ReductionBundle::apply_phi(const Homomorphism& f,
                                        const Structure& instance) const {
  if (const auto* pp = std::get_if<PPData>(&data_)) return phi(f, instance, pp->pp);
  if (const auto* he = std::get_if<HomEquivData>(&data_)) {
    if (!is_valid_hom(f) || !(f.target == he->into_inner.source))
      throw std::invalid_argument(
          "apply_phi: f is not a valid homomorphism into the outer template");
    return compose(f, he->into_inner);
  }
  const auto& chain = std::get<ComposeData>(data_);
  const Structure middle = chain.first->apply_gamma(instance);
  return chain.second->apply_phi(chain.first->apply_phi(f, instance), middle);
}

Homomorphism ReductionBundle::apply_psi(const Homomorphism& g,
                                        const Structure& instance) const {
  if (const auto* pp = std::get_if<PPData>(&data_)) return psi(g, instance, pp->pp);
  if (const auto* he = std::get_if<HomEquivData>(&data_)) {
    if (!is_valid_hom(g) || !(g.target == he->into_outer.source))
      throw std::invalid_argument(
          "apply_psi: g is not a valid homomorphism into the inner template");
    return compose(g, he->into_outer);
  }
  const auto& chain = std::get<ComposeData>(data_);
  const Structure middle = chain.first->apply_gamma(instance);
  return chain.first->apply_psi(chain.second->apply_psi(g, middle), instance);
}

ReductionBundle hom_equiv_reduction(Homomorphism theta1, Homomorphism theta2) {
  return ReductionBundle::from_hom_equivalence(std::move(theta1), std::move(theta2));
}

ReductionBundle compose_reductions(ReductionBundle b1, ReductionBundle b2) {
  return ReductionBundle::composed(std::move(b1), std::move(b2));
}

}  // namespace polyhom
