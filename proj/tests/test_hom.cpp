#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "polyhom/hom.hpp"
#include "test_util.hpp"

using namespace polyhom;
using testutil::brute_force_count;
using testutil::brute_force_hom;
using testutil::random_instance;
using testutil::random_size;

TEST_CASE("validity check follows the definition") {
  const Structure k2 = *builtin_structure("K2");
  const Structure c4 = *builtin_structure("C4");
  CHECK(is_valid_hom({c4, k2, {{"0", "0"}, {"1", "1"}, {"2", "0"}, {"3", "1"}}}));
  CHECK_FALSE(is_valid_hom({c4, k2, {{"0", "0"}, {"1", "0"}, {"2", "0"}, {"3", "0"}}}));
  // partial map is invalid
  CHECK_FALSE(is_valid_hom({c4, k2, {{"0", "0"}}}));
  // values outside the target universe are invalid
  CHECK_FALSE(is_valid_hom({c4, k2, {{"0", "9"}, {"1", "1"}, {"2", "0"}, {"3", "1"}}}));
}

TEST_CASE("composition chains maps and checks endpoints") {
  const Structure k2 = *builtin_structure("K2");
  const Structure p3 = testutil::path3();
  const Homomorphism fold{p3, k2, {{"a", "0"}, {"b", "1"}, {"c", "0"}}};
  const Homomorphism embed{k2, p3, {{"0", "a"}, {"1", "b"}}};
  const Homomorphism round = compose(embed, fold);
  CHECK(round.map == std::map<std::string, std::string>{{"0", "0"}, {"1", "1"}});
  CHECK_THROWS_AS(compose(fold, fold), std::invalid_argument);
}

TEST_CASE("find_hom returns the lexicographically first witness") {
  const auto result = find_hom(*builtin_structure("C5"), *builtin_structure("K3"));
  REQUIRE(result.status == SearchStatus::found);
  CHECK(is_valid_hom(*result.witness));
  const auto oracle = brute_force_hom(*builtin_structure("C5"), *builtin_structure("K3"));
  REQUIRE(oracle.has_value());
  CHECK(result.witness->map == *oracle);
}

TEST_CASE("find_hom certifies absence by exhaustion") {
  const auto result = find_hom(*builtin_structure("K3"), *builtin_structure("K2"));
  CHECK(result.status == SearchStatus::absent);
  CHECK_FALSE(result.witness.has_value());
}

TEST_CASE("empty instance maps immediately") {
  const Structure empty(Signature({{"E", 2}}), {}, {});
  const auto result = find_hom(empty, *builtin_structure("K2"));
  REQUIRE(result.status == SearchStatus::found);
  CHECK(result.witness->map.empty());
}

TEST_CASE("empty template admits nothing") {
  const Structure empty(Signature({{"E", 2}}), {}, {});
  const Structure one(Signature({{"E", 2}}), {"a"}, {});
  CHECK(find_hom(one, empty).status == SearchStatus::absent);
}

TEST_CASE("signature mismatch and oversized targets are rejected") {
  const Structure k2 = *builtin_structure("K2");
  const Structure lin = *builtin_structure("3LIN2");
  CHECK_THROWS_AS(find_hom(k2, lin), std::invalid_argument);
  std::vector<std::string> big;
  for (int i = 0; i < 65; ++i) big.push_back("v" + std::to_string(i));
  const Structure wide(Signature({{"E", 2}}), big, {});
  CHECK_THROWS_AS(find_hom(k2, wide), std::invalid_argument);
}

TEST_CASE("budget exhaustion reports unknown, never absent") {
  SearchOptions options;
  options.node_budget = 1;
  const auto result = find_hom(*builtin_structure("C5"), *builtin_structure("K2"), options);
  CHECK(result.status == SearchStatus::unknown);
  CHECK(result.nodes >= 1);
}

TEST_CASE("parallel search returns the same witness as sequential") {
  const Structure c7 = *builtin_structure("C7");
  const Structure k3 = *builtin_structure("K3");
  const auto sequential = find_hom(c7, k3);
  SearchOptions options;
  options.parallel = 4;
  const auto parallel = find_hom(c7, k3, options);
  REQUIRE(sequential.status == SearchStatus::found);
  REQUIRE(parallel.status == SearchStatus::found);
  CHECK(sequential.witness->map == parallel.witness->map);

  SUBCASE("parallel absence agrees too") {
    const auto seq2 = find_hom(k3, *builtin_structure("K2"));
    auto par2 = find_hom(k3, *builtin_structure("K2"), options);
    CHECK(seq2.status == SearchStatus::absent);
    CHECK(par2.status == SearchStatus::absent);
  }
}

TEST_CASE("degree ordering still finds valid witnesses") {
  SearchOptions options;
  options.var_order = VarOrder::by_degree;
  const auto result = find_hom(*builtin_structure("C5"), *builtin_structure("K3"), options);
  REQUIRE(result.status == SearchStatus::found);
  CHECK(is_valid_hom(*result.witness));
}

TEST_CASE("enumeration lists every homomorphism in witness order") {
  const Structure k3 = *builtin_structure("K3");
  const auto all = enumerate_homs(k3, k3);
  CHECK(all.size() == 6);  // exactly the six permutations
  for (const auto& h : all) CHECK(is_valid_hom(h));
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].map < all[i].map);
  CHECK(enumerate_homs(k3, k3, 2).size() == 2);
  CHECK(enumerate_homs(*builtin_structure("C4"), *builtin_structure("K2")).size() == 2);
}

TEST_CASE("enumeration count matches brute force on random instances") {
  std::mt19937_64 rng(20260818);
  const Signature sig({{"E", 2}});
  const Structure k2 = *builtin_structure("K2");
  for (int trial = 0; trial < 40; ++trial) {
    const Structure x = random_instance(rng, sig, random_size(rng, 1, 4), 30);
    CHECK(enumerate_homs(x, k2).size() == brute_force_count(x, k2));
  }
}

TEST_CASE("search agrees with the brute-force oracle") {
  std::mt19937_64 rng(424242);
  const Signature sig({{"E", 2}});
  const Structure k3 = *builtin_structure("K3");
  const Structure k2 = *builtin_structure("K2");
  for (int trial = 0; trial < 60; ++trial) {
    const Structure x = random_instance(rng, sig, random_size(rng, 1, 4), 35);
    const Structure& tmpl = trial % 2 == 0 ? k3 : k2;
    const auto got = find_hom(x, tmpl);
    const auto expected = brute_force_hom(x, tmpl);
    if (expected.has_value()) {
      REQUIRE(got.status == SearchStatus::found);
      CHECK(got.witness->map == *expected);
    } else {
      CHECK(got.status == SearchStatus::absent);
    }
  }
}

TEST_CASE("repeated variables inside one tuple are handled") {
  // loop at a forces a looped target vertex
  const Structure x(Signature({{"E", 2}}), {"a"}, {{"E", {{"a", "a"}}}});
  CHECK(find_hom(x, *builtin_structure("K2")).status == SearchStatus::absent);
  const Structure loop(Signature({{"E", 2}}), {"v"}, {{"E", {{"v", "v"}}}});
  CHECK(find_hom(x, loop).status == SearchStatus::found);
}

TEST_CASE("finite solvability scans subsets smallest first") {
  const Structure k2 = *builtin_structure("K2");
  // K3 plus a looped vertex: the loop breaks alone, before any triple
  Structure bad(Signature({{"E", 2}}), {"0", "1", "2", "z"},
                {{"E",
                  {{"0", "1"}, {"1", "0"}, {"0", "2"}, {"2", "0"},
                   {"1", "2"}, {"2", "1"}, {"z", "z"}}}});
  const auto r1 = finitely_solvable_up_to(bad, k2, 4);
  CHECK(r1.status == SearchStatus::absent);
  CHECK(r1.failing_subset == std::vector<std::string>{"z"});

  const auto r2 = finitely_solvable_up_to(*builtin_structure("K3"), k2, 2);
  CHECK(r2.status == SearchStatus::found);
  const auto r3 = finitely_solvable_up_to(*builtin_structure("K3"), k2, 3);
  CHECK(r3.status == SearchStatus::absent);
  CHECK(r3.failing_subset == std::vector<std::string>{"0", "1", "2"});

  CHECK_THROWS_AS(finitely_solvable_up_to(k2, k2, 0), std::invalid_argument);
  CHECK_THROWS_AS(finitely_solvable_up_to(k2, k2, 3), std::invalid_argument);
}

TEST_CASE("homomorphic equivalence needs both directions") {
  const Structure k2 = *builtin_structure("K2");
  const Structure p3 = testutil::path3();
  const auto equiv = hom_equivalent(k2, p3);
  REQUIRE(equiv.status == SearchStatus::found);
  CHECK(is_valid_hom(*equiv.forward));
  CHECK(is_valid_hom(*equiv.backward));

  const auto not_equiv = hom_equivalent(k2, *builtin_structure("K3"));
  CHECK(not_equiv.status == SearchStatus::absent);
}
