#include "polyhom/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace polyhom {

namespace {

using nlohmann::json;

std::string render(const json& j) { return j.dump(2) + "\n"; }

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
  }
}

void require_keys(const json& j, const std::string& what,
                  const std::vector<std::string>& required,
                  const std::vector<std::string>& optional = {}) {
  if (!j.is_object())
    throw std::invalid_argument(what + " must be a JSON object");
  for (const auto& key : required)
    if (!j.contains(key))
      throw std::invalid_argument(what + " is missing the '" + key + "' field");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (std::find(required.begin(), required.end(), key) == required.end() &&
        std::find(optional.begin(), optional.end(), key) == optional.end())
      throw std::invalid_argument(what + " has an unknown field '" + key + "'");
  }
}

std::string get_string(const json& j, const std::string& what) {
  if (!j.is_string()) throw std::invalid_argument(what + " must be a string");
  return j.get<std::string>();
}

int get_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw std::invalid_argument(what + " must be an integer");
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& what) {
  if (!j.is_boolean()) throw std::invalid_argument(what + " must be a boolean");
  return j.get<bool>();
}

std::vector<std::string> get_string_array(const json& j, const std::string& what) {
  if (!j.is_array()) throw std::invalid_argument(what + " must be an array of strings");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& item : j) out.push_back(get_string(item, "entry of " + what));
  return out;
}

std::map<std::string, std::string> get_string_map(const json& j, const std::string& what) {
  if (!j.is_object()) throw std::invalid_argument(what + " must be an object of strings");
  std::map<std::string, std::string> out;
  for (const auto& item : j.items())
    out[item.key()] = get_string(item.value(), "'" + item.key() + "' of " + what);
  return out;
}

json signature_json(const Signature& sig) {
  json out = json::array();
  for (const auto& symbol : sig.symbols())
    out.push_back(json{{"arity", symbol.arity}, {"name", symbol.name}});
  return out;
}

Signature signature_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw std::invalid_argument(what + " must be an array");
  std::vector<Symbol> symbols;
  for (const auto& item : j) {
    require_keys(item, "entry of " + what, {"name", "arity"});
    symbols.push_back(Symbol{get_string(item["name"], "'name' in " + what),
                             get_int(item["arity"], "'arity' in " + what)});
  }
  return Signature(std::move(symbols));
}

json structure_json(const Structure& s) {
  json relations = json::object();
  for (const auto& symbol : s.signature().symbols()) {
    json tuples = json::array();
    for (const auto& tuple : s.relation(symbol.name)) tuples.push_back(tuple);
    relations[symbol.name] = std::move(tuples);
  }
  return json{{"relations", std::move(relations)},
              {"signature", signature_json(s.signature())},
              {"universe", s.universe()}};
}

Structure structure_from(const json& j) {
  require_keys(j, "structure", {"signature", "universe"}, {"relations"});
  const Signature sig = signature_from(j["signature"], "'signature'");
  std::vector<std::string> universe = get_string_array(j["universe"], "'universe'");
  std::map<std::string, TupleSet> relations;
  if (j.contains("relations")) {
    if (!j["relations"].is_object())
      throw std::invalid_argument("'relations' must be an object");
    for (const auto& item : j["relations"].items()) {
      const std::string& name = item.key();
      if (!item.value().is_array())
        throw std::invalid_argument("relation '" + name + "' must be an array of tuples");
      TupleSet tuples;
      for (const auto& t : item.value())
        tuples.insert(get_string_array(t, "tuple of relation '" + name + "'"));
      relations[name] = std::move(tuples);
    }
  }
  return Structure(sig, std::move(universe), std::move(relations));
}

json varref_json(const VarRef& v) {
  if (v.kind == VarRef::Kind::z)
    return json{{"j", v.coord}, {"kind", "z"}, {"s", v.tuple_index}};
  return json{{"kind", "w"}, {"t", v.coord}};
}

VarRef varref_from(const json& j, const std::string& what) {
  if (!j.is_object()) throw std::invalid_argument(what + " must be an object");
  if (!j.contains("kind")) throw std::invalid_argument(what + " is missing the 'kind' field");
  const std::string kind = get_string(j["kind"], "'kind' of " + what);
  if (kind == "z") {
    require_keys(j, what, {"kind", "s", "j"});
    return VarRef::z(get_int(j["s"], "'s' of " + what), get_int(j["j"], "'j' of " + what));
  }
  if (kind == "w") {
    require_keys(j, what, {"kind", "t"});
    return VarRef::w(get_int(j["t"], "'t' of " + what));
  }
  throw std::invalid_argument("'kind' of " + what + " must be \"z\" or \"w\"");
}

}  // namespace

std::string structure_to_json(const Structure& s) { return render(structure_json(s)); }

Structure structure_from_json(const std::string& text) { return structure_from(parse(text)); }

Structure resolve_structure(const std::string& ref) {
  const std::string prefix = "builtin:";
  if (ref.rfind(prefix, 0) == 0) {
    const std::string name = ref.substr(prefix.size());
    auto s = builtin_structure(name);
    if (!s) throw std::invalid_argument("unknown builtin structure '" + name + "'");
    return *s;
  }
  if (auto s = builtin_structure(ref)) return *s;
  return structure_from_json(read_text_file(ref));
}

std::string hom_to_json(const Homomorphism& h, const std::string& source_ref,
                        const std::string& target_ref) {
  json j{{"map", h.map}};
  if (!source_ref.empty()) j["source"] = source_ref;
  if (!target_ref.empty()) j["target"] = target_ref;
  return render(j);
}

Homomorphism hom_from_json(const std::string& text, const Structure& source,
                           const Structure& target) {
  const json j = parse(text);
  require_keys(j, "homomorphism", {"map"}, {"source", "target"});
  return Homomorphism{source, target, get_string_map(j["map"], "'map'")};
}

Homomorphism hom_from_json(const std::string& text, const StructureResolver& resolver) {
  const json j = parse(text);
  require_keys(j, "homomorphism", {"map", "source", "target"});
  const Structure source = resolver(get_string(j["source"], "'source'"));
  const Structure target = resolver(get_string(j["target"], "'target'"));
  return Homomorphism{source, target, get_string_map(j["map"], "'map'")};
}

std::string poly_to_json(const Polymorphism& f) {
  json table = json::object();
  for (const auto& [args, value] : f.table) table[join_tuple(args)] = value;
  return render(json{{"arity", f.arity}, {"table", std::move(table)}});
}

Polymorphism poly_from_json(const std::string& text, const Structure& tmpl) {
  const json j = parse(text);
  require_keys(j, "polymorphism", {"arity", "table"});
  const int arity = get_int(j["arity"], "'arity'");
  if (arity < 1) throw std::invalid_argument("'arity' must be positive");
  if (!j["table"].is_object()) throw std::invalid_argument("'table' must be an object");
  Polymorphism f;
  f.tmpl = tmpl;
  f.arity = arity;
  for (const auto& item : j["table"].items()) {
    Tuple args = split_element(item.key());
    if (static_cast<int>(args.size()) != arity)
      throw std::invalid_argument("table key '" + item.key() + "' does not have " +
                                  std::to_string(arity) + " entries");
    f.table[std::move(args)] = get_string(item.value(), "table entry '" + item.key() + "'");
  }
  return f;
}

std::string pp_to_json(const PPPower& pp) {
  if (pp.base_ref.empty())
    throw std::invalid_argument("pp-power has no base reference; set base_ref before serializing");
  json defs = json::object();
  for (const auto& [name, def] : pp.defs) {
    json atoms = json::array();
    for (const auto& atom : def.atoms) {
      json args = json::array();
      for (const auto& arg : atom.args) args.push_back(varref_json(arg));
      atoms.push_back(json{{"args", std::move(args)}, {"rel", atom.relation}});
    }
    defs[name] = json{{"atoms", std::move(atoms)}, {"witnesses", def.witness_count}};
  }
  return render(json{{"base", pp.base_ref},
                     {"defs", std::move(defs)},
                     {"n", pp.dimension},
                     {"signature_E", signature_json(pp.target_signature)}});
}

PPPower pp_from_json(const std::string& text, const StructureResolver& resolver) {
  const json j = parse(text);
  require_keys(j, "pp-power", {"base", "n", "signature_E", "defs"});
  PPPower pp;
  pp.base_ref = get_string(j["base"], "'base'");
  pp.base = resolver(pp.base_ref);
  pp.dimension = get_int(j["n"], "'n'");
  pp.target_signature = signature_from(j["signature_E"], "'signature_E'");
  if (!j["defs"].is_object()) throw std::invalid_argument("'defs' must be an object");
  for (const auto& item : j["defs"].items()) {
    const std::string& name = item.key();
    require_keys(item.value(), "definition of '" + name + "'", {"witnesses", "atoms"});
    PPRelationDef def;
    def.witness_count = get_int(item.value()["witnesses"], "'witnesses' of '" + name + "'");
    const json& atoms = item.value()["atoms"];
    if (!atoms.is_array())
      throw std::invalid_argument("'atoms' of '" + name + "' must be an array");
    for (const auto& a : atoms) {
      require_keys(a, "atom of '" + name + "'", {"rel", "args"});
      Atom atom;
      atom.relation = get_string(a["rel"], "'rel' of an atom of '" + name + "'");
      if (!a["args"].is_array())
        throw std::invalid_argument("'args' of an atom of '" + name + "' must be an array");
      for (const auto& arg : a["args"])
        atom.args.push_back(varref_from(arg, "argument of an atom of '" + name + "'"));
      def.atoms.push_back(std::move(atom));
    }
    pp.defs[name] = std::move(def);
  }
  validate_pp(pp);
  return pp;
}

std::string gamma_to_json(const GammaOutput& g) {
  json witnesses = json::array();
  for (const auto& [key, element] : g.witnesses)
    witnesses.push_back(json{{"element", element},
                             {"index", key.index},
                             {"relation", key.relation},
                             {"tuple", key.tuple}});
  json equality = json::array();
  for (const auto& [a, b] : g.equality_graph) equality.push_back(json::array({a, b}));
  return render(json{{"class_of", g.class_of},
                     {"compiled", structure_json(g.compiled)},
                     {"equality_graph", std::move(equality)},
                     {"witnesses", std::move(witnesses)}});
}

GammaOutput gamma_from_json(const std::string& text) {
  const json j = parse(text);
  require_keys(j, "compiled instance", {"class_of", "compiled", "equality_graph", "witnesses"});
  GammaOutput g;
  g.compiled = structure_from(j["compiled"]);
  g.class_of = get_string_map(j["class_of"], "'class_of'");
  if (!j["witnesses"].is_array())
    throw std::invalid_argument("'witnesses' must be an array");
  for (const auto& item : j["witnesses"]) {
    require_keys(item, "witness entry", {"element", "index", "relation", "tuple"});
    WitnessKey key;
    key.relation = get_string(item["relation"], "'relation' of a witness entry");
    key.tuple = get_string_array(item["tuple"], "'tuple' of a witness entry");
    key.index = get_int(item["index"], "'index' of a witness entry");
    g.witnesses[key] = get_string(item["element"], "'element' of a witness entry");
  }
  if (!j["equality_graph"].is_array())
    throw std::invalid_argument("'equality_graph' must be an array");
  for (const auto& item : j["equality_graph"]) {
    const auto pair = get_string_array(item, "entry of 'equality_graph'");
    if (pair.size() != 2)
      throw std::invalid_argument("entry of 'equality_graph' must be a pair");
    g.equality_graph.emplace_back(pair[0], pair[1]);
  }
  return g;
}

std::string action_to_json(const GeneratedAction& a) {
  json generators = json::array();
  for (const auto& g : a.generators())
    generators.push_back(json{{"map", g.mapping()}, {"order", g.order()}});
  return render(json{{"commutative", a.commutative()}, {"generators", std::move(generators)}});
}

GeneratedAction action_from_json(const std::string& text,
                                 const std::vector<std::string>& universe) {
  const json j = parse(text);
  require_keys(j, "action", {"generators", "commutative"});
  if (!j["generators"].is_array())
    throw std::invalid_argument("'generators' must be an array");
  std::vector<Permutation> generators;
  for (const auto& item : j["generators"]) {
    require_keys(item, "generator", {"order", "map"});
    generators.emplace_back(get_string_map(item["map"], "'map' of a generator"),
                            get_int(item["order"], "'order' of a generator"));
  }
  return GeneratedAction(universe, std::move(generators),
                         get_bool(j["commutative"], "'commutative'"));
}

std::string filter_to_json(const SetFilter& f) {
  json base = json::array();
  for (const auto& b : f.base()) base.push_back(b);
  return render(json{{"base", std::move(base)}, {"ground", f.ground()}});
}

SetFilter filter_from_json(const std::string& text) {
  const json j = parse(text);
  require_keys(j, "filter", {"ground", "base"});
  std::vector<std::string> ground = get_string_array(j["ground"], "'ground'");
  if (!j["base"].is_array()) throw std::invalid_argument("'base' must be an array");
  std::vector<std::set<std::string>> base;
  for (const auto& item : j["base"]) {
    const auto entries = get_string_array(item, "entry of 'base'");
    base.emplace_back(entries.begin(), entries.end());
  }
  return SetFilter(std::move(ground), std::move(base));
}

std::string report_to_json(const DictatorshipReport& r) {
  return render(json{{"colorings", r.colorings},
                     {"normalized", r.normalized},
                     {"violations", r.violations}});
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open file '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed to write file '" + path + "'");
}

}  // namespace polyhom
