#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "polyhom/structure.hpp"

using namespace polyhom;

TEST_CASE("signature rejects duplicates and empty names") {
  CHECK_THROWS_AS(Signature({{"E", 2}, {"E", 3}}), std::invalid_argument);
  CHECK_THROWS_AS(Signature({{"", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Signature({{"E", 0}}), std::invalid_argument);
}

TEST_CASE("signature equality ignores declaration order") {
  const Signature a({{"E", 2}, {"Q", 1}});
  const Signature b({{"Q", 1}, {"E", 2}});
  CHECK(a == b);
  CHECK(a.arity_of("Q") == 1);
  CHECK_THROWS_AS(a.arity_of("missing"), std::invalid_argument);
}

TEST_CASE("structure validates universe and relations") {
  const Signature sig({{"E", 2}});
  CHECK_THROWS_AS(Structure(sig, {"a", "a"}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Structure(sig, {""}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Structure(sig, {"a"}, {{"F", {}}}), std::invalid_argument);
  CHECK_THROWS_AS(Structure(sig, {"a"}, {{"E", {{"a"}}}}), std::invalid_argument);
  CHECK_THROWS_AS(Structure(sig, {"a"}, {{"E", {{"a", "b"}}}}), std::invalid_argument);
}

TEST_CASE("omitted relation symbols default to empty") {
  const Structure s(Signature({{"E", 2}, {"Q", 1}}), {"a"}, {{"E", {{"a", "a"}}}});
  CHECK(s.relation("Q").empty());
  CHECK(s.relation("E").size() == 1);
  CHECK_THROWS_AS(s.relation("F"), std::invalid_argument);
  CHECK(s.index_of("a") == 0);
  CHECK_THROWS_AS(s.index_of("b"), std::invalid_argument);
}

TEST_CASE("join and split are inverse") {
  const Tuple t = {"a", "b", "c"};
  CHECK(join_tuple(t) == "a,b,c");
  CHECK(split_element("a,b,c") == t);
  CHECK(split_element("a") == Tuple{"a"});
}

TEST_CASE("power enumerates with the first coordinate slowest") {
  const Structure k2 = *builtin_structure("K2");
  const Structure p = power(k2, 2);
  CHECK(p.universe() == std::vector<std::string>{"0,0", "0,1", "1,0", "1,1"});
  // adjacency is coordinatewise: each vertex has one neighbour
  CHECK(p.relation("E").size() == 4);
  CHECK(p.relation("E").count({"0,0", "1,1"}) == 1);
  CHECK(p.relation("E").count({"0,0", "0,1"}) == 0);
}

TEST_CASE("power at exponent one renames nothing") {
  const Structure k3 = *builtin_structure("K3");
  CHECK(power(k3, 1) == k3);
  CHECK_THROWS_AS(power(k3, 0), std::invalid_argument);
}

TEST_CASE("power of K3 squared has 36 directed edges") {
  const Structure p = power(*builtin_structure("K3"), 2);
  CHECK(p.size() == 9);
  CHECK(p.relation("E").size() == 36);
}

TEST_CASE("power rejects elements containing the delimiter") {
  const Structure s(Signature({{"E", 2}}), {"a,b"}, {});
  CHECK_THROWS_AS(power(s, 2), std::invalid_argument);
}

TEST_CASE("induced substructure keeps only internal tuples") {
  const Structure k3 = *builtin_structure("K3");
  const Structure sub = induced_substructure(k3, {"0", "2"});
  CHECK(sub.universe() == std::vector<std::string>{"0", "2"});
  CHECK(sub.relation("E") == TupleSet{{"0", "2"}, {"2", "0"}});
  CHECK_THROWS_AS(induced_substructure(k3, {"0", "9"}), std::invalid_argument);
}

TEST_CASE("quotient names blocks by their earliest member") {
  const Structure c4 = *builtin_structure("Cn:4");  // vertices 0..3
  // identify opposite vertices: {0,2} and {1,3} — the quotient is a loopless
  // double edge on two vertices
  const Structure q = quotient(c4, EquivalencePartition{{{"0", "2"}, {"1", "3"}}});
  CHECK(q.universe() == std::vector<std::string>{"0", "1"});
  CHECK(q.relation("E") == TupleSet{{"0", "1"}, {"1", "0"}});
}

TEST_CASE("quotient can create loops") {
  const Structure k2 = *builtin_structure("K2");
  const Structure q = quotient(k2, EquivalencePartition{{{"0", "1"}}});
  CHECK(q.size() == 1);
  CHECK(q.relation("E") == TupleSet{{"0", "0"}});
}

TEST_CASE("quotient validates the partition") {
  const Structure k2 = *builtin_structure("K2");
  CHECK_THROWS_AS(quotient(k2, EquivalencePartition{{{"0"}}}), std::invalid_argument);
  CHECK_THROWS_AS(quotient(k2, EquivalencePartition{{{"0", "1"}, {"1"}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(quotient(k2, EquivalencePartition{{{"0", "1"}, {}}}),
                  std::invalid_argument);
}

TEST_CASE("isomorphism check via an explicit bijection") {
  const Structure k3 = *builtin_structure("K3");
  CHECK(isomorphic_via(k3, k3, {{"0", "1"}, {"1", "2"}, {"2", "0"}}));
  const Structure p3(Signature({{"E", 2}}), {"a", "b", "c"},
                     {{"E", {{"a", "b"}, {"b", "a"}, {"b", "c"}, {"c", "b"}}}});
  CHECK_FALSE(isomorphic_via(k3, p3, {{"0", "a"}, {"1", "b"}, {"2", "c"}}));
}

TEST_CASE("builtin structures") {
  const Structure k2 = *builtin_structure("K2");
  CHECK(k2.universe() == std::vector<std::string>{"0", "1"});
  CHECK(k2.relation("E") == TupleSet{{"0", "1"}, {"1", "0"}});

  const Structure lin = *builtin_structure("3LIN2");
  CHECK(lin.universe() == std::vector<std::string>{"0", "1"});
  CHECK(lin.relation("S0") ==
        TupleSet{{"0", "0", "0"}, {"0", "1", "1"}, {"1", "0", "1"}, {"1", "1", "0"}});
  CHECK(lin.relation("S1") ==
        TupleSet{{"0", "0", "1"}, {"0", "1", "0"}, {"1", "0", "0"}, {"1", "1", "1"}});

  CHECK(*builtin_structure("Cn:5") == *builtin_structure("C5"));
  CHECK(*builtin_structure("Kn:4") == *builtin_structure("K4"));
  CHECK(builtin_structure("C5")->relation("E").size() == 10);
  CHECK(!builtin_structure("unknown").has_value());
  CHECK(!builtin_structure("Kx").has_value());
}

TEST_CASE("degenerate cycle sizes are rejected") {
  CHECK_THROWS_AS(builtin_structure("Cn:2"), std::invalid_argument);
  CHECK_THROWS_AS(builtin_structure("Kn:0"), std::invalid_argument);
}
