#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "polyhom/json_io.hpp"
#include "polyhom/structure.hpp"
#include "pp_fixtures.hpp"
#include "test_util.hpp"

using namespace polyhom;
using nlohmann::json;

namespace {

const std::string kWorkDir = "/tmp/polyhom_cli_tests";

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr combined
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(POLYHOM_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  RunResult result;
  if (pipe == nullptr) return result;
  char buffer[4096];
  while (std::fgets(buffer, sizeof buffer, pipe) != nullptr) result.output += buffer;
  const int status = pclose(pipe);
  if (WIFEXITED(status)) result.code = WEXITSTATUS(status);
  return result;
}

std::string path_in_workdir(const std::string& name) {
  std::filesystem::create_directories(kWorkDir);
  return kWorkDir + "/" + name;
}

std::string write_fixture(const std::string& name, const std::string& text) {
  const std::string path = path_in_workdir(name);
  write_text_file(path, text);
  return path;
}

std::string write_pp_fixture(const std::string& name) {
  PPPower pp = fixtures::pp_path_k2();
  pp.base_ref = "builtin:K2";
  return write_fixture(name, pp_to_json(pp));
}

}  // namespace

TEST_CASE("solve reports found, absent, and budget-limited searches") {
  CHECK(run_cli("solve builtin:C5 builtin:K3").code == 0);
  CHECK(run_cli("solve builtin:C5 builtin:K3").output.find("homomorphism found") !=
        std::string::npos);
  CHECK(run_cli("solve builtin:K3 builtin:K2").code == 1);
  CHECK(run_cli("solve builtin:C5 builtin:K3 --budget 1").code == 3);
  // Global flags may come before the subcommand as well.
  CHECK(run_cli("--budget 1 solve builtin:C5 builtin:K3").code == 3);
}

TEST_CASE("argument errors exit with the error code") {
  CHECK(run_cli("no-such-command").code == 2);
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("solve builtin:C5").code == 2);
  CHECK(run_cli("--help").code == 0);
  const std::string bad = write_fixture("bad.json", "this is not json\n");
  const RunResult r = run_cli("solve " + bad + " builtin:K2");
  CHECK(r.code == 2);
  CHECK(r.output.find("error:") != std::string::npos);
  CHECK(run_cli("solve builtin:K9999x builtin:K2").code == 2);
}

TEST_CASE("enumerate prints a count and the full list") {
  const RunResult r = run_cli("enumerate builtin:K3 builtin:K3 --json");
  REQUIRE(r.code == 0);
  const json payload = json::parse(r.output);
  CHECK(payload.at("count").get<int>() == 6);
  CHECK(payload.at("homs").size() == 6);

  const RunResult limited = run_cli("enumerate builtin:K3 builtin:K3 --json --limit 2");
  CHECK(json::parse(limited.output).at("count").get<int>() == 2);

  const RunResult none = run_cli("enumerate builtin:K3 builtin:K2 --json");
  CHECK(none.code == 1);
  CHECK(json::parse(none.output).at("count").get<int>() == 0);
}

TEST_CASE("solve --out feeds verify") {
  const std::string witness = path_in_workdir("witness.json");
  CHECK(run_cli("solve builtin:C5 builtin:K3 --out " + witness).code == 0);
  CHECK(run_cli("verify " + witness + " builtin:C5 builtin:K3").code == 0);

  // A constant map cannot color a cycle.
  Homomorphism constant{*builtin_structure("C5"), *builtin_structure("K3"), {}};
  for (const std::string& v : constant.source.universe()) constant.map[v] = "0";
  const std::string broken = write_fixture("broken.json", hom_to_json(constant));
  CHECK(run_cli("verify " + broken + " builtin:C5 builtin:K3").code == 1);
}

TEST_CASE("poly and decide-star report cyclic polymorphism existence") {
  const RunResult found = run_cli("poly --cyclic --arity 3 builtin:K2 --json");
  REQUIRE(found.code == 0);
  CHECK(json::parse(found.output).at("arity").get<int>() == 3);
  CHECK(run_cli("poly --arity 3 builtin:K2").code == 2);
  CHECK(run_cli("poly --cyclic --arity 2 builtin:K3").code == 1);

  const RunResult star = run_cli("decide-star builtin:K2 --json");
  REQUIRE(star.code == 0);
  const json payload = json::parse(star.output);
  CHECK(payload.at("cyclic").get<bool>());
  CHECK(payload.at("prime").get<int>() == 3);
  const RunResult refuted = run_cli("decide-star builtin:K3 --json");
  CHECK(refuted.code == 1);
  CHECK(json::parse(refuted.output).at("prime").get<int>() == 5);
}

TEST_CASE("finsolv distinguishes the bound that exposes the obstruction") {
  const RunResult ok = run_cli("finsolv builtin:K3 builtin:K2 --k 2 --json");
  CHECK(ok.code == 0);
  const RunResult bad = run_cli("finsolv builtin:K3 builtin:K2 --k 3 --json");
  CHECK(bad.code == 1);
  const json payload = json::parse(bad.output);
  CHECK(payload.at("failing_subset").size() == 3);
}

TEST_CASE("reduce compiles an instance through a pp-power file") {
  const std::string pp = write_pp_fixture("pp_path.json");
  const Structure x(Signature({{"R", 2}}), {"x", "y"}, {{"R", {{"x", "y"}}}});
  const std::string inst = write_fixture("edge.json", structure_to_json(x));

  const RunResult r = run_cli("reduce --pp " + pp + " " + inst + " --json");
  REQUIRE(r.code == 0);
  const json payload = json::parse(r.output);
  CHECK(payload.at("compiled").at("universe").size() == 3);
  CHECK(payload.at("class_of").size() == 2);
}

TEST_CASE("transfer moves solutions both ways across the compilation") {
  const std::string pp = write_pp_fixture("pp_transfer.json");
  const Structure x(Signature({{"R", 2}}), {"x", "y"}, {{"R", {{"x", "y"}}}});
  const std::string inst = write_fixture("edge_transfer.json", structure_to_json(x));
  Homomorphism f{x, eval_pp_power(fixtures::pp_path_k2()), {{"x", "0"}, {"y", "0"}}};
  const std::string f_path = write_fixture("f.json", hom_to_json(f));
  const std::string g_path = path_in_workdir("g.json");
  const std::string back_path = path_in_workdir("f_back.json");

  CHECK(run_cli("transfer --pp " + pp + " --phi " + f_path + " " + inst + " --out " +
                g_path)
            .code == 0);
  CHECK(run_cli("transfer --pp " + pp + " --psi " + g_path + " " + inst + " --out " +
                back_path)
            .code == 0);
  const json original = json::parse(read_text_file(f_path));
  const json returned = json::parse(read_text_file(back_path));
  CHECK(original.at("map") == returned.at("map"));

  CHECK(run_cli("transfer --pp " + pp + " " + f_path + " " + inst).code == 2);
  CHECK(run_cli("transfer --pp " + pp + " --phi --psi " + f_path + " " + inst).code ==
        2);
}

TEST_CASE("cover restricts the compiled instance around chosen elements") {
  const std::string pp = write_pp_fixture("pp_cover.json");
  const Structure x(Signature({{"R", 2}}), {"x", "y", "z"},
                    {{"R", {{"x", "y"}, {"y", "z"}}}});
  const std::string inst = write_fixture("path_cover.json", structure_to_json(x));
  const RunResult r = run_cli("cover --pp " + pp + " --subset x@1,z@1 " + inst + " --json");
  REQUIRE(r.code == 0);
  const json payload = json::parse(r.output);
  CHECK(payload.at("subset").size() >= 2);
  CHECK(payload.at("theta").at("map").size() == 2);
}

TEST_CASE("schreier output feeds solve and invariant-solve") {
  const std::string graph = path_in_workdir("schreier.json");
  const std::string action = path_in_workdir("schreier_action.json");
  CHECK(run_cli("schreier --primes 3,5 --out " + graph + " --action-out " + action).code ==
        0);
  CHECK(run_cli("solve " + graph + " builtin:K3").code == 0);
  CHECK(run_cli("invariant-solve " + graph + " builtin:K3 --action " + action).code == 1);
  CHECK(run_cli("schreier --primes 4").code == 2);
  CHECK(run_cli("schreier --primes 5,3").code == 2);
}

TEST_CASE("symmetrize builds the all-ones invariant solution") {
  const Structure lin = *builtin_structure("3LIN2");
  const Structure tri(lin.signature(), {"p", "q", "r"},
                      {{"S1", {{"p", "q", "r"}, {"q", "r", "p"}, {"r", "p", "q"}}}});
  const std::string inst = write_fixture("triangle.json", structure_to_json(tri));
  Homomorphism h0{tri, lin, {{"p", "1"}, {"q", "0"}, {"r", "0"}}};
  const std::string hom = write_fixture("h0.json", hom_to_json(h0));
  const GeneratedAction action(
      tri.universe(), {Permutation({{"p", "q"}, {"q", "r"}, {"r", "p"}}, 3)}, true);
  const std::string act = write_fixture("rotation.json", action_to_json(action));
  const std::string poly = write_fixture("xor3.json", poly_to_json(testutil::xor3(lin)));

  const RunResult r = run_cli("symmetrize " + hom + " " + inst +
                              " builtin:3LIN2 --action " + act + " --poly " + poly +
                              " --json");
  REQUIRE(r.code == 0);
  const json payload = json::parse(r.output);
  for (const auto& [vertex, color] : payload.at("map").items()) {
    CHECK(color.get<std::string>() == "1");
  }
}

TEST_CASE("ultra runs the dictatorship demos") {
  const RunResult two = run_cli("ultra --demo 2 --json");
  REQUIRE(two.code == 0);
  const json payload = json::parse(two.output);
  CHECK(payload.at("colorings").get<int>() == 12);
  CHECK(payload.at("normalized").get<int>() == 2);
  CHECK(payload.at("violations").get<int>() == 0);
  CHECK(run_cli("ultra --demo 4").code == 2);
}

TEST_CASE("payload bytes are identical between --json and --out") {
  const std::string out = path_in_workdir("payload.json");
  const RunResult direct = run_cli("enumerate builtin:K2 builtin:K2 --json");
  REQUIRE(direct.code == 0);
  REQUIRE(run_cli("enumerate builtin:K2 builtin:K2 --out " + out).code == 0);
  CHECK(read_text_file(out) == direct.output);
  // Parallel search returns the same payload as the sequential one.
  const RunResult parallel = run_cli("solve builtin:C5 builtin:K3 --parallel 4 --json");
  const RunResult sequential = run_cli("solve builtin:C5 builtin:K3 --json");
  CHECK(parallel.output == sequential.output);
}
