#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "polyhom/json_io.hpp"

namespace {

using nlohmann::json;
using namespace polyhom;

// Exit codes: 0 found/true, 1 not-found/false, 2 error, 3 unknown/budget.
constexpr int kFound = 0;
constexpr int kAbsent = 1;
constexpr int kError = 2;
constexpr int kUnknown = 3;

struct GlobalFlags {
  std::uint64_t budget = 0;
  unsigned parallel = 1;
  std::uint64_t seed = 0;
  std::string out;
  bool json_output = false;
};

std::string render(const json& j) { return j.dump(2) + "\n"; }

SearchOptions search_options(const GlobalFlags& flags) {
  SearchOptions options;
  options.node_budget = flags.budget;
  options.parallel = flags.parallel;
  return options;
}

/// Writes the payload to --out when given, then prints either the payload
/// (--json) or the human summary.  Payload bytes never depend on timing.
int emit(const GlobalFlags& flags, int code, const std::string& summary,
         const std::string& payload) {
  if (!flags.out.empty() && !payload.empty()) write_text_file(flags.out, payload);
  if (flags.json_output && !payload.empty())
    std::fputs(payload.c_str(), stdout);
  else
    std::printf("%s\n", summary.c_str());
  return code;
}

void print_map(const std::map<std::string, std::string>& map) {
  for (const auto& [from, to] : map) std::printf("  %s -> %s\n", from.c_str(), to.c_str());
}

int run_solve(const GlobalFlags& flags, const std::string& instance_ref,
              const std::string& template_ref) {
  const Structure instance = resolve_structure(instance_ref);
  const Structure tmpl = resolve_structure(template_ref);
  const HomSearchResult result = find_hom(instance, tmpl, search_options(flags));
  if (result.status == SearchStatus::found) {
    const std::string payload = hom_to_json(*result.witness, instance_ref, template_ref);
    const int code = emit(flags, kFound, "homomorphism found", payload);
    if (!flags.json_output) print_map(result.witness->map);
    return code;
  }
  if (result.status == SearchStatus::absent)
    return emit(flags, kAbsent, "no homomorphism exists", "");
  return emit(flags, kUnknown, "node budget exhausted; result unknown", "");
}

int run_enumerate(const GlobalFlags& flags, const std::string& instance_ref,
                  const std::string& template_ref, std::uint64_t limit) {
  const Structure instance = resolve_structure(instance_ref);
  const Structure tmpl = resolve_structure(template_ref);
  const std::vector<Homomorphism> homs = enumerate_homs(instance, tmpl, limit);
  json list = json::array();
  for (const Homomorphism& h : homs) list.push_back(json{{"map", h.map}});
  const std::string payload =
      render(json{{"count", homs.size()}, {"homs", std::move(list)}});
  const std::string summary = "homomorphisms found: " + std::to_string(homs.size());
  return emit(flags, homs.empty() ? kAbsent : kFound, summary, payload);
}

int run_finsolv(const GlobalFlags& flags, const std::string& instance_ref,
                const std::string& template_ref, int k) {
  const Structure instance = resolve_structure(instance_ref);
  const Structure tmpl = resolve_structure(template_ref);
  const FiniteSolvabilityResult result =
      finitely_solvable_up_to(instance, tmpl, k, search_options(flags));
  const char* status = result.status == SearchStatus::found    ? "found"
                       : result.status == SearchStatus::absent ? "absent"
                                                               : "unknown";
  const std::string payload = render(
      json{{"failing_subset", result.failing_subset}, {"k", k}, {"status", status}});
  if (result.status == SearchStatus::found)
    return emit(flags, kFound,
                "every induced substructure with at most " + std::to_string(k) +
                    " elements maps to the template",
                payload);
  if (result.status == SearchStatus::absent) {
    std::string subset;
    for (const auto& e : result.failing_subset) {
      if (!subset.empty()) subset += ",";
      subset += e;
    }
    return emit(flags, kAbsent, "induced substructure {" + subset + "} has no homomorphism",
                payload);
  }
  return emit(flags, kUnknown, "node budget exhausted; result unknown", payload);
}

int run_poly(const GlobalFlags& flags, const std::string& template_ref, int arity) {
  const Structure tmpl = resolve_structure(template_ref);
  const CyclicSearchResult result =
      find_cyclic_polymorphism(tmpl, arity, search_options(flags));
  if (result.status == SearchStatus::found)
    return emit(flags, kFound,
                "cyclic polymorphism of arity " + std::to_string(arity) + " found",
                poly_to_json(*result.witness));
  if (result.status == SearchStatus::absent)
    return emit(flags, kAbsent,
                "no cyclic polymorphism of arity " + std::to_string(arity) + " exists", "");
  return emit(flags, kUnknown, "node budget exhausted; result unknown", "");
}

int run_decide_star(const GlobalFlags& flags, const std::string& template_ref) {
  const Structure tmpl = resolve_structure(template_ref);
  const StarDecision decision = decide_star(tmpl, search_options(flags));
  const std::string payload =
      render(json{{"cyclic", decision.status == SearchStatus::found},
                  {"prime", decision.prime}});
  if (decision.status == SearchStatus::found)
    return emit(flags, kFound,
                "cyclic polymorphism of prime arity " + std::to_string(decision.prime) +
                    " exists",
                payload);
  if (decision.status == SearchStatus::absent)
    return emit(flags, kAbsent,
                "no cyclic polymorphism of prime arity " + std::to_string(decision.prime),
                payload);
  return emit(flags, kUnknown, "node budget exhausted; result unknown", payload);
}

int run_reduce(const GlobalFlags& flags, const std::string& pp_path,
               const std::string& instance_ref) {
  const PPPower pp = pp_from_json(read_text_file(pp_path), resolve_structure);
  const Structure instance = resolve_structure(instance_ref);
  const GammaOutput compiled = gamma(instance, pp);
  return emit(flags, kFound,
              "compiled instance has " + std::to_string(compiled.compiled.size()) +
                  " elements",
              gamma_to_json(compiled));
}

int run_transfer(const GlobalFlags& flags, const std::string& pp_path, bool forward,
                 const std::string& hom_path, const std::string& instance_ref) {
  const PPPower pp = pp_from_json(read_text_file(pp_path), resolve_structure);
  const Structure instance = resolve_structure(instance_ref);
  const std::string hom_text = read_text_file(hom_path);
  if (forward) {
    // The target of f is defined by the pp-power; phi validates f against it
    // semantically, so no materialized target structure is needed here.
    const Homomorphism f = hom_from_json(hom_text, instance, Structure());
    const Homomorphism transferred = phi(f, instance, pp);
    return emit(flags, kFound, "solution transferred to the compiled instance",
                hom_to_json(transferred, "", pp.base_ref));
  }
  const Homomorphism g =
      hom_from_json(hom_text, gamma(instance, pp).compiled, pp.base);
  const Homomorphism transferred = psi(g, instance, pp);
  return emit(flags, kFound, "solution transferred back to the original instance",
              hom_to_json(transferred, instance_ref, ""));
}

int run_cover(const GlobalFlags& flags, const std::string& pp_path,
              const std::string& instance_ref, const std::string& subset_csv) {
  const PPPower pp = pp_from_json(read_text_file(pp_path), resolve_structure);
  const Structure instance = resolve_structure(instance_ref);
  std::set<std::string> subset;
  std::stringstream parts(subset_csv);
  for (std::string item; std::getline(parts, item, ',');)
    if (!item.empty()) subset.insert(item);
  const CoverResult result = finite_cover(instance, pp, subset);
  const std::string payload = render(
      json{{"subset", result.subset}, {"theta", json{{"map", result.theta.map}}}});
  std::string members;
  for (const auto& e : result.subset) {
    if (!members.empty()) members += ",";
    members += e;
  }
  return emit(flags, kFound, "finite cover over {" + members + "}", payload);
}

int run_symmetrize(const GlobalFlags& flags, const std::string& hom_path,
                   const std::string& instance_ref, const std::string& template_ref,
                   const std::string& action_path,
                   const std::vector<std::string>& poly_paths) {
  const Structure instance = resolve_structure(instance_ref);
  const Structure tmpl = resolve_structure(template_ref);
  const Homomorphism h0 = hom_from_json(read_text_file(hom_path), instance, tmpl);
  const GeneratedAction action =
      action_from_json(read_text_file(action_path), instance.universe());
  std::map<int, Polymorphism> polys_by_order;
  for (const std::string& path : poly_paths) {
    Polymorphism f = poly_from_json(read_text_file(path), tmpl);
    polys_by_order[f.arity] = std::move(f);
  }
  const Homomorphism result = make_invariant(h0, action, polys_by_order);
  const int code = emit(flags, kFound, "invariant homomorphism built",
                        hom_to_json(result, instance_ref, template_ref));
  if (!flags.json_output) print_map(result.map);
  return code;
}

int run_invariant_solve(const GlobalFlags& flags, const std::string& instance_ref,
                        const std::string& template_ref, const std::string& action_path) {
  const Structure instance = resolve_structure(instance_ref);
  const Structure tmpl = resolve_structure(template_ref);
  const GeneratedAction action =
      action_from_json(read_text_file(action_path), instance.universe());
  const InvariantSearchResult result =
      invariant_hom_exists(instance, action, tmpl, search_options(flags));
  if (result.status == SearchStatus::found) {
    const int code = emit(flags, kFound, "invariant homomorphism found",
                          hom_to_json(*result.witness, instance_ref, template_ref));
    if (!flags.json_output) print_map(result.witness->map);
    return code;
  }
  if (result.status == SearchStatus::absent)
    return emit(flags, kAbsent, "no invariant homomorphism exists", "");
  return emit(flags, kUnknown, "node budget exhausted; result unknown", "");
}

int run_schreier(const GlobalFlags& flags, const std::vector<int>& primes,
                 const std::string& action_out) {
  const auto [instance, action] = schreier_instance(primes);
  if (!action_out.empty()) write_text_file(action_out, action_to_json(action));
  std::string cycles;
  for (int p : primes) {
    if (!cycles.empty()) cycles += ", ";
    cycles += "C" + std::to_string(p);
  }
  return emit(flags, kFound, "generated disjoint cycles " + cycles,
              structure_to_json(instance));
}

int run_ultra(const GlobalFlags& flags, int demo, bool large) {
  const DictatorshipReport report = dictatorship_check(demo, large);
  const std::string summary = "colorings=" + std::to_string(report.colorings) +
                              " normalized=" + std::to_string(report.normalized) +
                              " violations=" + std::to_string(report.violations);
  return emit(flags, report.violations == 0 ? kFound : kAbsent, summary,
              report_to_json(report));
}

int run_verify(const GlobalFlags& flags, const std::string& hom_path,
               const std::string& instance_ref, const std::string& template_ref) {
  const Structure instance = resolve_structure(instance_ref);
  const Structure tmpl = resolve_structure(template_ref);
  const Homomorphism h = hom_from_json(read_text_file(hom_path), instance, tmpl);
  if (is_valid_hom(h)) return emit(flags, kFound, "homomorphism verifies", "");
  return emit(flags, kAbsent, "map is not a homomorphism", "");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-structure homomorphism and reduction toolkit"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--budget", flags.budget, "node budget for searches (0 = unbounded)");
  app.add_option("--parallel", flags.parallel, "worker threads for unbudgeted searches");
  app.add_option("--seed", flags.seed,
                 "seed for randomized generation (reserved; these commands are deterministic)");
  app.add_option("--out", flags.out, "write the JSON payload to this path");
  app.add_flag("--json", flags.json_output, "print the JSON payload instead of a summary");

  std::function<int()> run;

  std::string instance_ref, template_ref, hom_path, pp_path, action_path, action_out;
  std::vector<std::string> poly_paths;
  std::string subset_csv;
  std::vector<int> primes;
  std::uint64_t limit = 0;
  int k = 1, arity = 0, demo = 0;
  bool use_phi = false, use_psi = false, cyclic = false, large = false;

  auto* solve = app.add_subcommand("solve", "search for a homomorphism");
  solve->fallthrough();
  solve->add_option("instance", instance_ref, "instance structure (path or builtin:<name>)")
      ->required();
  solve->add_option("template", template_ref, "template structure")->required();
  solve->callback([&] { run = [&] { return run_solve(flags, instance_ref, template_ref); }; });

  auto* enumerate = app.add_subcommand("enumerate", "list all homomorphisms");
  enumerate->fallthrough();
  enumerate->add_option("instance", instance_ref, "instance structure")->required();
  enumerate->add_option("template", template_ref, "template structure")->required();
  enumerate->add_option("--limit", limit, "stop after this many (0 = all)");
  enumerate->callback(
      [&] { run = [&] { return run_enumerate(flags, instance_ref, template_ref, limit); }; });

  auto* finsolv = app.add_subcommand(
      "finsolv", "check all induced substructures up to a size bound");
  finsolv->fallthrough();
  finsolv->add_option("instance", instance_ref, "instance structure")->required();
  finsolv->add_option("template", template_ref, "template structure")->required();
  finsolv->add_option("--k", k, "maximum substructure size")->required();
  finsolv->callback(
      [&] { run = [&] { return run_finsolv(flags, instance_ref, template_ref, k); }; });

  auto* poly = app.add_subcommand("poly", "search for a cyclic polymorphism");
  poly->fallthrough();
  poly->add_flag("--cyclic", cyclic, "search for a cyclic polymorphism")->required();
  poly->add_option("--arity", arity, "polymorphism arity (prime)")->required();
  poly->add_option("template", template_ref, "template structure")->required();
  poly->callback([&] { run = [&] { return run_poly(flags, template_ref, arity); }; });

  auto* star = app.add_subcommand(
      "decide-star", "decide existence of a cyclic polymorphism at the canonical prime");
  star->fallthrough();
  star->add_option("template", template_ref, "template structure")->required();
  star->callback([&] { run = [&] { return run_decide_star(flags, template_ref); }; });

  auto* reduce = app.add_subcommand("reduce", "compile an instance through a pp-power");
  reduce->fallthrough();
  reduce->add_option("--pp", pp_path, "pp-power definition file")->required();
  reduce->add_option("instance", instance_ref, "instance structure")->required();
  reduce->callback([&] { run = [&] { return run_reduce(flags, pp_path, instance_ref); }; });

  auto* transfer = app.add_subcommand("transfer", "move a solution across a reduction");
  transfer->fallthrough();
  transfer->add_option("--pp", pp_path, "pp-power definition file")->required();
  transfer->add_flag("--phi", use_phi, "transfer instance solution to the compiled instance");
  transfer->add_flag("--psi", use_psi, "transfer compiled solution back to the instance");
  transfer->add_option("hom", hom_path, "homomorphism file")->required();
  transfer->add_option("instance", instance_ref, "instance structure")->required();
  transfer->callback([&] {
    run = [&] {
      if (use_phi == use_psi)
        throw std::invalid_argument("transfer requires exactly one of --phi or --psi");
      return run_transfer(flags, pp_path, use_phi, hom_path, instance_ref);
    };
  });

  auto* cover = app.add_subcommand(
      "cover", "restrict a compiled instance to a finite subset with its map");
  cover->fallthrough();
  cover->add_option("--pp", pp_path, "pp-power definition file")->required();
  cover->add_option("--subset", subset_csv, "compiled elements (comma separated)")
      ->required();
  cover->add_option("instance", instance_ref, "instance structure")->required();
  cover->callback(
      [&] { run = [&] { return run_cover(flags, pp_path, instance_ref, subset_csv); }; });

  auto* symmetrize = app.add_subcommand(
      "symmetrize", "make a homomorphism invariant under a commuting action");
  symmetrize->fallthrough();
  symmetrize->add_option("hom", hom_path, "starting homomorphism file")->required();
  symmetrize->add_option("instance", instance_ref, "instance structure")->required();
  symmetrize->add_option("template", template_ref, "template structure")->required();
  symmetrize->add_option("--action", action_path, "group action file")->required();
  symmetrize
      ->add_option("--poly", poly_paths,
                   "cyclic polymorphism file, one per generator order (repeatable)")
      ->required();
  symmetrize->callback([&] {
    run = [&] {
      return run_symmetrize(flags, hom_path, instance_ref, template_ref, action_path,
                            poly_paths);
    };
  });

  auto* invariant = app.add_subcommand(
      "invariant-solve", "search for a homomorphism constant on the action's orbits");
  invariant->fallthrough();
  invariant->add_option("instance", instance_ref, "instance structure")->required();
  invariant->add_option("template", template_ref, "template structure")->required();
  invariant->add_option("--action", action_path, "group action file")->required();
  invariant->callback([&] {
    run = [&] { return run_invariant_solve(flags, instance_ref, template_ref, action_path); };
  });

  auto* schreier = app.add_subcommand(
      "schreier", "generate disjoint prime cycles with their rotation action");
  schreier->fallthrough();
  schreier->add_option("--primes", primes, "strictly increasing odd primes (comma separated)")
      ->required()
      ->delimiter(',');
  schreier->add_option("--action-out", action_out, "write the rotation action to this path");
  schreier->callback([&] { run = [&] { return run_schreier(flags, primes, action_out); }; });

  auto* ultra = app.add_subcommand(
      "ultra", "enumerate colorings of the disagreement graph and check extracted families");
  ultra->fallthrough();
  ultra->add_option("--demo", demo, "ground-set size")->required();
  ultra->add_flag("--large", large, "allow ground-set size 4");
  ultra->callback([&] { run = [&] { return run_ultra(flags, demo, large); }; });

  auto* verify = app.add_subcommand("verify", "check a homomorphism file by definition");
  verify->fallthrough();
  verify->add_option("hom", hom_path, "homomorphism file")->required();
  verify->add_option("instance", instance_ref, "instance structure")->required();
  verify->add_option("template", template_ref, "template structure")->required();
  verify->callback([&] {
    run = [&] { return run_verify(flags, hom_path, instance_ref, template_ref); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    return run();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
}
