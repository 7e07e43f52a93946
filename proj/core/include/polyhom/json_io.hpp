#pragma once

#include <functional>
#include <string>

#include "polyhom/reduction.hpp"
#include "polyhom/symmetry.hpp"
#include "polyhom/ultrafilter.hpp"

namespace polyhom {

/// All *_to_json functions render deterministic bytes: two-space indent,
/// alphabetically ordered object keys, trailing newline.  All *_from_json
/// functions reject unknown keys and throw std::invalid_argument naming the
/// offending field.

std::string structure_to_json(const Structure& s);
Structure structure_from_json(const std::string& text);

/// Maps a reference string to a structure.  The default resolver
/// (resolve_structure) accepts "builtin:<name>", a bare builtin name, or a
/// file path, in that precedence order.
using StructureResolver = std::function<Structure(const std::string&)>;
Structure resolve_structure(const std::string& ref);

/// `{"map":{...}}` plus optional "source"/"target" reference strings.
std::string hom_to_json(const Homomorphism& h, const std::string& source_ref = "",
                        const std::string& target_ref = "");
/// Reads the map against explicitly supplied structures; reference fields in
/// the text are allowed and ignored.
Homomorphism hom_from_json(const std::string& text, const Structure& source,
                           const Structure& target);
/// Reads the map and resolves the mandatory "source"/"target" references.
Homomorphism hom_from_json(const std::string& text, const StructureResolver& resolver);

/// `{"arity":p,"table":{"0,0,0":"0",...}}` keyed by comma-joined tuples.
std::string poly_to_json(const Polymorphism& f);
Polymorphism poly_from_json(const std::string& text, const Structure& tmpl);

/// `{"base":"K2","n":1,"signature_E":[...],"defs":{...}}`; the base is
/// stored as a reference string (pp.base_ref), never inline.
std::string pp_to_json(const PPPower& pp);
PPPower pp_from_json(const std::string& text, const StructureResolver& resolver);

/// Compiled structure plus the class_of map, the witness table and the
/// equality graph.
std::string gamma_to_json(const GammaOutput& g);
GammaOutput gamma_from_json(const std::string& text);

/// `{"generators":[{"order":3,"map":{...}}],"commutative":true}`; the
/// universe comes from the instance the action applies to.
std::string action_to_json(const GeneratedAction& a);
GeneratedAction action_from_json(const std::string& text,
                                 const std::vector<std::string>& universe);

/// `{"ground":["x1","x2"],"base":[["x1"]]}`.
std::string filter_to_json(const SetFilter& f);
SetFilter filter_from_json(const std::string& text);

/// `{"colorings":12,"normalized":2,"violations":0}`.
std::string report_to_json(const DictatorshipReport& r);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace polyhom
