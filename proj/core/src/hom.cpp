#include "polyhom/hom.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <deque>
#include <functional>
#include <future>
#include <limits>
#include <stdexcept>
#include <vector>

namespace polyhom {

bool is_valid_hom(const Homomorphism& h) {
  if (!(h.source.signature() == h.target.signature())) return false;
  for (const std::string& x : h.source.universe()) {
    auto it = h.map.find(x);
    if (it == h.map.end() || !h.target.has_element(it->second)) return false;
  }
  if (h.map.size() != h.source.size()) return false;
  for (const auto& [name, tuples] : h.source.relations()) {
    const TupleSet& target_tuples = h.target.relation(name);
    for (const Tuple& t : tuples) {
      Tuple image(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) image[i] = h.map.at(t[i]);
      if (!target_tuples.count(image)) return false;
    }
  }
  return true;
}

Homomorphism compose(const Homomorphism& first, const Homomorphism& then) {
  if (!(first.target == then.source))
    throw std::invalid_argument("compose: intermediate structures do not match");
  std::map<std::string, std::string> map;
  for (const auto& [x, y] : first.map) map[x] = then.map.at(y);
  return Homomorphism{first.source, then.target, std::move(map)};
}

namespace {

// --- Compiled CSP form -----------------------------------------------------
//
// Variables are instance elements (by universe index), values are target
// elements (by universe index), domains are 64-bit masks.  Every instance
// tuple becomes one positive table constraint whose table is the shared
// tuple list of the same relation in the target.

using Mask = std::uint64_t;

struct Constraint {
  std::vector<int> scope;            // variable per position
  std::vector<int> prev_same;        // earlier position with same variable, or -1
  const std::vector<std::vector<int>>* table = nullptr;
};

struct CompiledCsp {
  int num_vars = 0;
  int dom_size = 0;
  std::vector<std::vector<std::vector<int>>> tables;  // one per used relation
  std::vector<Constraint> constraints;
  std::vector<std::vector<int>> watchers;  // variable -> constraint indices
  std::vector<int> order;                  // static variable order
};

CompiledCsp compile_csp(const Structure& instance, const Structure& tmpl,
                        VarOrder var_order) {
  if (!(instance.signature() == tmpl.signature()))
    throw std::invalid_argument("find_hom: structures do not share a signature");
  if (tmpl.size() > 64)
    throw std::invalid_argument("find_hom: target universe exceeds 64 elements");

  CompiledCsp csp;
  csp.num_vars = static_cast<int>(instance.size());
  csp.dom_size = static_cast<int>(tmpl.size());
  csp.watchers.resize(csp.num_vars);

  for (const auto& [name, tuples] : instance.relations()) {
    if (tuples.empty()) continue;
    csp.tables.emplace_back();
    std::vector<std::vector<int>>& table = csp.tables.back();
    for (const Tuple& t : tmpl.relation(name)) {
      std::vector<int> row(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) row[i] = tmpl.index_of(t[i]);
      table.push_back(std::move(row));
    }
    for (const Tuple& t : tuples) {
      Constraint c;
      c.scope.resize(t.size());
      c.prev_same.assign(t.size(), -1);
      for (std::size_t i = 0; i < t.size(); ++i) {
        c.scope[i] = instance.index_of(t[i]);
        for (std::size_t j = 0; j < i; ++j)
          if (c.scope[j] == c.scope[i]) {
            c.prev_same[i] = static_cast<int>(j);
            break;
          }
      }
      csp.constraints.push_back(std::move(c));
    }
  }
  // Tables vector no longer reallocates; wire up the pointers and watchers.
  std::size_t table_idx = 0, constraint_idx = 0;
  for (const auto& [name, tuples] : instance.relations()) {
    if (tuples.empty()) continue;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      Constraint& c = csp.constraints[constraint_idx];
      c.table = &csp.tables[table_idx];
      for (std::size_t q = 0; q < c.scope.size(); ++q)
        if (c.prev_same[q] < 0)
          csp.watchers[c.scope[q]].push_back(static_cast<int>(constraint_idx));
      ++constraint_idx;
    }
    ++table_idx;
  }

  csp.order.resize(csp.num_vars);
  for (int v = 0; v < csp.num_vars; ++v) csp.order[v] = v;
  if (var_order == VarOrder::by_degree) {
    std::vector<int> degree(csp.num_vars, 0);
    for (const Constraint& c : csp.constraints)
      for (int v : c.scope) ++degree[v];
    std::stable_sort(csp.order.begin(), csp.order.end(),
                     [&](int a, int b) { return degree[a] > degree[b]; });
  }
  return csp;
}

// --- Generalized arc consistency -------------------------------------------

enum class RunStatus { found, absent, unknown, aborted };

struct Propagator {
  const CompiledCsp& csp;
  std::deque<int> queue;
  std::vector<char> in_queue;

  explicit Propagator(const CompiledCsp& c) : csp(c), in_queue(c.constraints.size(), 0) {}

  void enqueue(int ci) {
    if (!in_queue[ci]) {
      in_queue[ci] = 1;
      queue.push_back(ci);
    }
  }
  void enqueue_all() {
    for (std::size_t ci = 0; ci < csp.constraints.size(); ++ci) enqueue(static_cast<int>(ci));
  }
  void enqueue_watching(int var) {
    for (int ci : csp.watchers[var]) enqueue(ci);
  }

  // Restricts every scope variable of c to its supported values.  Returns
  // false on a domain wipeout.
  bool revise(const Constraint& c, std::vector<Mask>& dom) {
    const std::size_t k = c.scope.size();
    Mask supp[16];
    std::vector<Mask> supp_big;
    Mask* s = supp;
    if (k > 16) {
      supp_big.assign(k, 0);
      s = supp_big.data();
    } else {
      std::fill(supp, supp + k, Mask{0});
    }
    for (const std::vector<int>& t : *c.table) {
      bool ok = true;
      for (std::size_t q = 0; q < k; ++q) {
        if (!((dom[c.scope[q]] >> t[q]) & 1) ||
            (c.prev_same[q] >= 0 && t[c.prev_same[q]] != t[q])) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      for (std::size_t q = 0; q < k; ++q) s[q] |= Mask{1} << t[q];
    }
    for (std::size_t q = 0; q < k; ++q) {
      if (c.prev_same[q] >= 0) continue;
      const int v = c.scope[q];
      const Mask nd = dom[v] & s[q];
      if (nd != dom[v]) {
        dom[v] = nd;
        if (nd == 0) return false;
        enqueue_watching(v);
      }
    }
    return true;
  }

  bool run(std::vector<Mask>& dom) {
    while (!queue.empty()) {
      const int ci = queue.front();
      queue.pop_front();
      in_queue[ci] = 0;
      if (!revise(csp.constraints[ci], dom)) {
        queue.clear();
        std::fill(in_queue.begin(), in_queue.end(), 0);
        return false;
      }
    }
    return true;
  }
};

// --- Backtracking search ----------------------------------------------------

struct Searcher {
  const CompiledCsp& csp;
  std::uint64_t budget = 0;  // 0 = unbounded
  std::uint64_t nodes = 0;
  bool budget_hit = false;

  // Parallel root-splitting: a worker abandons its branch once a strictly
  // earlier branch has reported a solution (that result wins regardless).
  std::atomic<int>* first_found = nullptr;
  int branch_index = 0;

  std::optional<std::vector<int>> solution;

  // Enumeration sink; when set, the search keeps going after each solution
  // until the sink returns false.
  std::function<bool(const std::vector<int>&)> sink;

  explicit Searcher(const CompiledCsp& c) : csp(c) {}

  RunStatus search(std::vector<Mask> dom, int depth) {
    Propagator prop(csp);
    if (depth == 0) {
      prop.enqueue_all();
      if (!prop.run(dom)) return RunStatus::absent;
    }
    return dfs(dom, depth, prop);
  }

  RunStatus dfs(std::vector<Mask>& dom, int depth, Propagator& prop) {
    if (depth == csp.num_vars) {
      std::vector<int> sol(csp.num_vars);
      for (int v = 0; v < csp.num_vars; ++v)
        sol[v] = std::countr_zero(dom[v]);
      if (sink) return sink(sol) ? RunStatus::absent : RunStatus::found;
      solution = std::move(sol);
      return RunStatus::found;
    }
    const int var = csp.order[depth];
    const Mask values = dom[var];
    for (int val = 0; val < csp.dom_size; ++val) {
      if (!((values >> val) & 1)) continue;
      ++nodes;
      if (budget && nodes > budget) {
        budget_hit = true;
        return RunStatus::unknown;
      }
      if (first_found && (nodes & 1023) == 0 &&
          first_found->load(std::memory_order_relaxed) < branch_index)
        return RunStatus::aborted;
      std::vector<Mask> child = dom;
      child[var] = Mask{1} << val;
      prop.enqueue_watching(var);
      if (!prop.run(child)) continue;
      const RunStatus r = dfs(child, depth + 1, prop);
      if (r != RunStatus::absent) return r;
    }
    return RunStatus::absent;
  }
};

std::vector<Mask> full_domains(const CompiledCsp& csp) {
  const Mask full = csp.dom_size == 64 ? ~Mask{0}
                                       : ((Mask{1} << csp.dom_size) - 1);
  return std::vector<Mask>(csp.num_vars, full);
}

Homomorphism assignment_to_hom(const Structure& instance, const Structure& tmpl,
                               const std::vector<int>& sol) {
  std::map<std::string, std::string> map;
  for (std::size_t v = 0; v < sol.size(); ++v)
    map[instance.universe()[v]] = tmpl.universe()[sol[v]];
  return Homomorphism{instance, tmpl, std::move(map)};
}

}  // namespace

HomSearchResult find_hom(const Structure& instance, const Structure& tmpl,
                         const SearchOptions& options) {
  const CompiledCsp csp = compile_csp(instance, tmpl, options.var_order);
  HomSearchResult result;

  if (csp.num_vars == 0) {
    result.status = SearchStatus::found;
    result.witness = Homomorphism{instance, tmpl, {}};
    return result;
  }

  const bool parallel =
      options.parallel > 1 && options.node_budget == 0 && csp.num_vars > 1;
  if (!parallel) {
    Searcher searcher(csp);
    searcher.budget = options.node_budget;
    const RunStatus r = searcher.search(full_domains(csp), 0);
    result.nodes = searcher.nodes;
    switch (r) {
      case RunStatus::found:
        result.status = SearchStatus::found;
        result.witness = assignment_to_hom(instance, tmpl, *searcher.solution);
        break;
      case RunStatus::unknown:
        result.status = SearchStatus::unknown;
        break;
      default:
        result.status = SearchStatus::absent;
        break;
    }
    return result;
  }

  // Root splitting: propagate once, then fan out over the first variable's
  // values.  The lowest-indexed branch with a solution supplies the witness,
  // which is exactly the sequential search's answer.
  std::vector<Mask> root = full_domains(csp);
  {
    Propagator prop(csp);
    prop.enqueue_all();
    if (!prop.run(root)) {
      result.status = SearchStatus::absent;
      return result;
    }
  }
  const int var = csp.order[0];
  std::vector<int> branch_values;
  for (int val = 0; val < csp.dom_size; ++val)
    if ((root[var] >> val) & 1) branch_values.push_back(val);

  std::atomic<int> first_found{std::numeric_limits<int>::max()};
  struct BranchOutcome {
    RunStatus status = RunStatus::absent;
    std::optional<std::vector<int>> solution;
    std::uint64_t nodes = 0;
  };
  std::vector<BranchOutcome> outcomes(branch_values.size());

  const unsigned workers =
      std::min<unsigned>(options.parallel, static_cast<unsigned>(branch_values.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= branch_values.size()) return;
      Searcher searcher(csp);
      searcher.first_found = &first_found;
      searcher.branch_index = static_cast<int>(i);
      std::vector<Mask> dom = root;
      dom[var] = Mask{1} << branch_values[i];
      Propagator prop(csp);
      prop.enqueue_watching(var);
      searcher.nodes = 1;  // the root assignment itself
      RunStatus r;
      if (!prop.run(dom))
        r = RunStatus::absent;
      else
        r = searcher.dfs(dom, 1, prop);
      outcomes[i].status = r;
      outcomes[i].nodes = searcher.nodes;
      if (r == RunStatus::found) {
        outcomes[i].solution = std::move(searcher.solution);
        int expected = first_found.load();
        while (static_cast<int>(i) < expected &&
               !first_found.compare_exchange_weak(expected, static_cast<int>(i))) {
        }
      }
    }
  };
  std::vector<std::future<void>> futures;
  for (unsigned w = 1; w < workers; ++w)
    futures.push_back(std::async(std::launch::async, work));
  work();
  for (auto& f : futures) f.get();

  result.status = SearchStatus::absent;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    result.nodes += outcomes[i].nodes;
    if (outcomes[i].status == RunStatus::found &&
        result.status != SearchStatus::found) {
      result.status = SearchStatus::found;
      result.witness = assignment_to_hom(instance, tmpl, *outcomes[i].solution);
    }
  }
  return result;
}

std::vector<Homomorphism> enumerate_homs(const Structure& instance, const Structure& tmpl,
                                         std::uint64_t limit) {
  const CompiledCsp csp = compile_csp(instance, tmpl, VarOrder::fixed);
  std::vector<Homomorphism> out;
  if (csp.num_vars == 0) {
    out.push_back(Homomorphism{instance, tmpl, {}});
    return out;
  }
  Searcher searcher(csp);
  searcher.sink = [&](const std::vector<int>& sol) {
    out.push_back(assignment_to_hom(instance, tmpl, sol));
    return limit == 0 || out.size() < limit;
  };
  searcher.search(full_domains(csp), 0);
  return out;
}

FiniteSolvabilityResult finitely_solvable_up_to(const Structure& instance,
                                                const Structure& tmpl, int k,
                                                const SearchOptions& options) {
  if (k < 1 || k > static_cast<int>(instance.size()))
    throw std::invalid_argument("finitely_solvable_up_to: k must satisfy 1 <= k <= " +
                                std::to_string(instance.size()) + ", got " +
                                std::to_string(k));
  FiniteSolvabilityResult result;
  bool saw_unknown = false;
  const int n = static_cast<int>(instance.size());
  for (int size = 1; size <= k; ++size) {
    // Index combinations in lexicographic order.
    std::vector<int> comb(size);
    for (int i = 0; i < size; ++i) comb[i] = i;
    while (true) {
      std::set<std::string> keep;
      for (int i : comb) keep.insert(instance.universe()[i]);
      const Structure sub = induced_substructure(instance, keep);
      const HomSearchResult r = find_hom(sub, tmpl, options);
      if (r.status == SearchStatus::absent) {
        result.status = SearchStatus::absent;
        for (int i : comb) result.failing_subset.push_back(instance.universe()[i]);
        return result;
      }
      if (r.status == SearchStatus::unknown) saw_unknown = true;
      int pos = size - 1;
      while (pos >= 0 && comb[pos] == n - size + pos) --pos;
      if (pos < 0) break;
      ++comb[pos];
      for (int i = pos + 1; i < size; ++i) comb[i] = comb[i - 1] + 1;
    }
  }
  result.status = saw_unknown ? SearchStatus::unknown : SearchStatus::found;
  return result;
}

HomEquivalenceResult hom_equivalent(const Structure& d, const Structure& e,
                                    const SearchOptions& options) {
  HomEquivalenceResult result;
  const HomSearchResult fwd = find_hom(d, e, options);
  if (fwd.status == SearchStatus::absent) {
    result.status = SearchStatus::absent;
    return result;
  }
  const HomSearchResult bwd = find_hom(e, d, options);
  if (bwd.status == SearchStatus::absent) {
    result.status = SearchStatus::absent;
    return result;
  }
  if (fwd.status == SearchStatus::found && bwd.status == SearchStatus::found) {
    result.status = SearchStatus::found;
    result.forward = fwd.witness;
    result.backward = bwd.witness;
  } else {
    result.status = SearchStatus::unknown;
  }
  return result;
}

}  // namespace polyhom
