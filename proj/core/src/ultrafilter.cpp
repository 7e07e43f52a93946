#include "polyhom/ultrafilter.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <iterator>
#include <stdexcept>

namespace polyhom {

namespace {

std::string render_set(const std::set<std::string>& a) {
  std::string out = "{";
  for (const auto& x : a) {
    if (out.size() > 1) out += ",";
    out += x;
  }
  return out + "}";
}

std::set<std::string> intersect(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.begin()));
  return out;
}

// All subsets of the ground set, smallest mask first; bit i picks ground[i].
std::vector<std::set<std::string>> all_subsets(const std::vector<std::string>& ground) {
  if (ground.size() > 20) throw std::invalid_argument("ground set too large to enumerate subsets");
  std::vector<std::set<std::string>> out;
  const std::uint32_t count = 1u << ground.size();
  out.reserve(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    std::set<std::string> subset;
    for (std::size_t i = 0; i < ground.size(); ++i)
      if (mask & (1u << i)) subset.insert(ground[i]);
    out.push_back(std::move(subset));
  }
  return out;
}

}  // namespace

SetFilter::SetFilter(std::vector<std::string> ground, std::vector<std::set<std::string>> base)
    : ground_(std::move(ground)), base_(std::move(base)) {
  if (ground_.empty()) throw std::invalid_argument("filter ground set is empty");
  const std::set<std::string> all(ground_.begin(), ground_.end());
  if (all.size() != ground_.size())
    throw std::invalid_argument("filter ground set has duplicate elements");
  if (base_.empty())
    throw std::invalid_argument("filter base is empty; use the whole ground set for the trivial filter");
  core_ = all;
  for (const auto& b : base_) {
    for (const auto& x : b)
      if (!all.count(x))
        throw std::invalid_argument("filter base element '" + x + "' is not in the ground set");
    core_ = intersect(core_, b);
  }
  if (core_.empty())
    throw std::invalid_argument("filter base intersection is empty; the generated filter is improper");
}

bool SetFilter::contains(const std::set<std::string>& a) const {
  for (const auto& x : a)
    if (std::find(ground_.begin(), ground_.end(), x) == ground_.end())
      throw std::invalid_argument("set element '" + x + "' is not in the filter ground set");
  return std::includes(a.begin(), a.end(), core_.begin(), core_.end());
}

Structure disagreement_graph(const SetFilter& filter, int max_ground) {
  const auto& ground = filter.ground();
  const int n = static_cast<int>(ground.size());
  if (n > max_ground)
    throw std::invalid_argument("ground set of size " + std::to_string(n) +
                                " exceeds the disagreement-graph bound " + std::to_string(max_ground));
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) count *= 3;
  std::vector<std::string> universe;
  universe.reserve(count);
  for (std::size_t v = 0; v < count; ++v) {
    std::string digits(static_cast<std::size_t>(n), '0');
    std::size_t rem = v;
    for (int i = n - 1; i >= 0; --i) {
      digits[static_cast<std::size_t>(i)] = static_cast<char>('0' + rem % 3);
      rem /= 3;
    }
    universe.push_back(std::move(digits));
  }
  TupleSet edges;
  for (const auto& f : universe) {
    for (const auto& g : universe) {
      if (f == g) continue;  // empty disagreement set, never in a proper filter
      std::set<std::string> where;
      for (int i = 0; i < n; ++i)
        if (f[static_cast<std::size_t>(i)] != g[static_cast<std::size_t>(i)])
          where.insert(ground[static_cast<std::size_t>(i)]);
      if (filter.contains(where)) edges.insert({f, g});
    }
  }
  return Structure(Signature({{"E", 2}}), universe, {{"E", std::move(edges)}});
}

Homomorphism normalize_coloring(const Homomorphism& coloring) {
  if (!is_valid_hom(coloring))
    throw std::invalid_argument("coloring is not a homomorphism into the color triangle");
  const std::vector<std::string> palette = {"0", "1", "2"};
  if (coloring.target.universe() != palette)
    throw std::invalid_argument("coloring target must have universe 0,1,2");
  const auto& vertices = coloring.source.universe();
  if (vertices.empty()) throw std::invalid_argument("coloring source has no vertices");
  const std::size_t len = vertices.front().size();
  std::array<std::string, 3> constants;
  for (int i = 0; i < 3; ++i) {
    constants[static_cast<std::size_t>(i)] = std::string(len, static_cast<char>('0' + i));
    if (!coloring.map.count(constants[static_cast<std::size_t>(i)]))
      throw std::invalid_argument("constant vertex '" + constants[static_cast<std::size_t>(i)] +
                                  "' is not a vertex of the coloring's source");
  }
  const TupleSet& edges = coloring.source.relation("E");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j && !edges.count({constants[static_cast<std::size_t>(i)],
                                  constants[static_cast<std::size_t>(j)]}))
        throw std::invalid_argument("constant vertices are not pairwise adjacent");
  // The unique color permutation sending the color of each constant back to
  // its own digit; well defined because adjacent constants get distinct colors.
  std::map<std::string, std::string> perm;
  for (int i = 0; i < 3; ++i)
    perm[coloring.map.at(constants[static_cast<std::size_t>(i)])] = palette[static_cast<std::size_t>(i)];
  if (perm.size() != 3)
    throw std::logic_error("proper coloring assigned one color to adjacent constants");
  Homomorphism out = coloring;
  for (auto& [vertex, color] : out.map) color = perm.at(color);
  return out;
}

ExtractedFamily extract_family(const Homomorphism& coloring,
                               const std::vector<std::string>& ground) {
  const std::size_t n = ground.size();
  if (n > 20) throw std::invalid_argument("ground set too large to enumerate subsets");
  for (int i = 0; i < 3; ++i) {
    const std::string constant(n, static_cast<char>('0' + i));
    auto it = coloring.map.find(constant);
    if (it == coloring.map.end())
      throw std::invalid_argument("constant vertex '" + constant +
                                  "' is missing from the coloring");
    if (it->second != std::string(1, static_cast<char>('0' + i)))
      throw std::invalid_argument("coloring is not normalized: constant '" + constant +
                                  "' maps to '" + it->second + "'");
  }
  ExtractedFamily family;
  family.ground = ground;
  const std::uint32_t count = 1u << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    std::string indicator(n, '0');
    std::set<std::string> subset;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        indicator[i] = '1';
        subset.insert(ground[i]);
      }
    }
    auto it = coloring.map.find(indicator);
    if (it == coloring.map.end())
      throw std::invalid_argument("indicator vertex '" + indicator +
                                  "' is missing from the coloring");
    if (it->second == "1") family.members.insert(std::move(subset));
  }
  return family;
}

UltrafilterCheck check_ultrafilter(const ExtractedFamily& family, const SetFilter& filter) {
  if (family.ground != filter.ground())
    throw std::invalid_argument("family and filter have different ground sets");
  const std::set<std::string> ground(family.ground.begin(), family.ground.end());
  for (const auto& member : family.members)
    for (const auto& x : member)
      if (!ground.count(x))
        throw std::invalid_argument("family member element '" + x + "' is not in the ground set");
  UltrafilterCheck out;
  auto fail = [&out](const char* axiom, std::string detail) {
    out.ok = false;
    out.failed_axiom = axiom;
    out.detail = std::move(detail);
    return out;
  };
  const auto& members = family.members;
  if (members.count({}))
    return fail("empty-set", "the empty set is a member");
  const std::vector<std::set<std::string>> subsets = all_subsets(family.ground);
  for (const auto& a : members)
    for (const auto& b : subsets)
      if (std::includes(b.begin(), b.end(), a.begin(), a.end()) && !members.count(b))
        return fail("upward-closure",
                    render_set(a) + " is a member but its superset " + render_set(b) + " is not");
  for (const auto& a : members)
    for (const auto& b : members) {
      const auto meet = intersect(a, b);
      if (!members.count(meet))
        return fail("intersection", render_set(a) + " and " + render_set(b) +
                                        " are members but " + render_set(meet) + " is not");
    }
  for (const auto& b : subsets)
    if (filter.contains(b) && !members.count(b))
      return fail("filter-containment",
                  render_set(b) + " is in the filter but not in the family");
  for (const auto& b : subsets) {
    std::set<std::string> complement;
    for (const auto& x : family.ground)
      if (!b.count(x)) complement.insert(x);
    const int hits = static_cast<int>(members.count(b)) + static_cast<int>(members.count(complement));
    if (hits != 1)
      return fail("maximality", render_set(b) + " and its complement " + render_set(complement) +
                                    (hits == 0 ? " are both missing" : " are both members"));
  }
  out.ok = true;
  return out;
}

Polymorphism coloring_as_operation(const Homomorphism& coloring,
                                   const std::vector<std::string>& ground) {
  const std::size_t n = ground.size();
  Polymorphism op;
  op.tmpl = coloring.target;
  op.arity = static_cast<int>(n);
  for (const auto& [vertex, color] : coloring.map) {
    if (vertex.size() != n)
      throw std::invalid_argument("vertex '" + vertex + "' does not match the ground size");
    Tuple args;
    args.reserve(n);
    for (char digit : vertex) args.push_back(std::string(1, digit));
    op.table[std::move(args)] = color;
  }
  return op;
}

DictatorshipReport dictatorship_check(int n, bool allow_large) {
  const int cap = allow_large ? 4 : 3;
  if (n < 1 || n > cap)
    throw std::invalid_argument("dictatorship check supports 1..3 coordinates (4 behind the flag)");
  std::vector<std::string> ground;
  for (int i = 1; i <= n; ++i) ground.push_back("x" + std::to_string(i));
  const SetFilter filter(ground, {std::set<std::string>(ground.begin(), ground.end())});
  const Structure graph = disagreement_graph(filter, cap);
  const Structure triangle = *builtin_structure("K3");
  const std::vector<Homomorphism> colorings = enumerate_homs(graph, triangle);
  DictatorshipReport report;
  report.colorings = static_cast<int>(colorings.size());
  std::set<std::map<std::string, std::string>> seen;
  for (const auto& coloring : colorings) {
    const Homomorphism normalized = normalize_coloring(coloring);
    if (!seen.insert(normalized.map).second) continue;
    ++report.normalized;
    const Polymorphism op = coloring_as_operation(normalized, ground);
    const std::set<int> essential = essential_coordinates(op);
    bool good = is_valid_polymorphism(op) && essential.size() == 1;
    if (good) {
      const ExtractedFamily family = extract_family(normalized, ground);
      const UltrafilterCheck check = check_ultrafilter(family, filter);
      // An ultrafilter on a finite set is principal; it must be generated by
      // the singleton at the unique essential coordinate.
      const std::set<std::string> point = {ground[static_cast<std::size_t>(*essential.begin() - 1)]};
      good = check.ok && family.members.count(point) > 0;
    }
    if (!good) ++report.violations;
  }
  return report;
}

}  // namespace polyhom
