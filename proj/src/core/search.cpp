#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "core/code.hpp"
#include "core/errors.hpp"

namespace entroflow {

namespace {

// Number of canonical tables over n positions and a symbols:
// sum_{k=1..min(a,n)} S(n,k), Stirling numbers of the second kind.
double canonical_count(int n, int a) {
  std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
  row[0] = 1.0;  // S(0,0)
  for (int i = 1; i <= n; ++i) {
    std::vector<double> next(row.size(), 0.0);
    for (int k = 1; k <= i; ++k) next[k] = k * row[k] + row[k - 1];
    row = std::move(next);
  }
  double total = 0.0;
  for (int k = 1; k <= std::min(a, n); ++k) total += row[k];
  return total;
}

// Lexicographic enumeration of canonically numbered tables: position j may use
// symbols up to (max of earlier positions) + 1.
class CanonicalTables {
 public:
  CanonicalTables(int positions, int alphabet) : alphabet_(alphabet), values_(positions, 0) {}
  const std::vector<int>& values() const { return values_; }
  bool next() {
    const int n = static_cast<int>(values_.size());
    std::vector<int> prefix_max(n, -1);
    for (int j = 1; j < n; ++j) prefix_max[j] = std::max(prefix_max[j - 1], values_[j - 1]);
    for (int j = n - 1; j >= 0; --j) {
      int bound = std::min(alphabet_ - 1, prefix_max[j] + 1);
      if (values_[j] < bound) {
        ++values_[j];
        std::fill(values_.begin() + j + 1, values_.end(), 0);
        return true;
      }
    }
    return false;
  }

 private:
  int alphabet_;
  std::vector<int> values_;
};

struct Check {
  enum class Kind { kDecode, kSecrecy } kind;
  std::vector<int> target;  // decode: session column; secrecy: source columns
  std::vector<int> given;   // decode: decoder inputs; secrecy: tapped edge columns
  std::string label;
};

struct Layout {
  std::vector<VariableRef> variables;
  std::vector<int> alphabets;
  std::map<VariableRef, int> column;
  int fixed_columns = 0;  // sessions + randomness

  int add(const VariableRef& v, int alphabet) {
    column[v] = static_cast<int>(variables.size());
    variables.push_back(v);
    alphabets.push_back(alphabet);
    return column[v];
  }
};

struct EdgeSlot {
  std::string id;
  int out = -1;
  int alphabet = 1;
  std::vector<VariableRef> inputs;
  std::vector<int> in;
  std::vector<std::size_t> stride;
  std::size_t table_size = 1;
  std::vector<int> copies;             // forwarding edges rooted here
  std::vector<std::size_t> checks;     // triggered once this edge is assigned
};

// One randomness-alphabet configuration: everything the DFS needs.
struct Instance {
  Layout layout;
  std::vector<EdgeSlot> slots;
  std::vector<Check> checks;
  std::vector<std::size_t> initial_checks;
  std::vector<int> base_rows;  // flat, rows x columns, edge columns zero
  std::size_t rows = 0;
  std::vector<std::pair<std::string, int>> randomness;  // node, alphabet (> 1 only)
};

// Packs selected columns of a row into one key, or reports that the key space
// would not fit into 64 bits.
struct KeyPacker {
  std::vector<int> cols;
  std::vector<std::uint64_t> radix;
  bool fits = true;
  KeyPacker(std::vector<int> c, const std::vector<int>& alphabets) : cols(std::move(c)) {
    double space = 1.0;
    for (int col : cols) {
      radix.push_back(static_cast<std::uint64_t>(alphabets[col]));
      space *= alphabets[col];
    }
    fits = space < 9.0e18;
  }
  std::uint64_t key(const int* row) const {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < cols.size(); ++i) k = k * radix[i] + static_cast<std::uint64_t>(row[cols[i]]);
    return k;
  }
  std::vector<int> wide(const int* row) const {
    std::vector<int> out;
    for (int col : cols) out.push_back(row[col]);
    return out;
  }
};

bool run_check(const Check& c, const std::vector<int>& rows, std::size_t n_rows, std::size_t width,
               const std::vector<int>& alphabets) {
  KeyPacker given(c.given, alphabets);
  KeyPacker target(c.target, alphabets);
  if (c.kind == Check::Kind::kDecode) {
    if (given.fits && target.fits) {
      std::unordered_map<std::uint64_t, std::uint64_t> seen;
      for (std::size_t r = 0; r < n_rows; ++r) {
        const int* row = &rows[r * width];
        auto [it, inserted] = seen.try_emplace(given.key(row), target.key(row));
        if (!inserted && it->second != target.key(row)) return false;
      }
      return true;
    }
    std::map<std::vector<int>, std::vector<int>> seen;
    for (std::size_t r = 0; r < n_rows; ++r) {
      const int* row = &rows[r * width];
      auto [it, inserted] = seen.try_emplace(given.wide(row), target.wide(row));
      if (!inserted && it->second != target.wide(row)) return false;
    }
    return true;
  }
  // secrecy: all rows carry equal mass, so independence is count(a,b) * R == count(a) * count(b)
  std::map<std::vector<int>, std::uint64_t> ca, cb;
  std::map<std::pair<std::vector<int>, std::vector<int>>, std::uint64_t> cab;
  for (std::size_t r = 0; r < n_rows; ++r) {
    const int* row = &rows[r * width];
    auto a = target.wide(row);
    auto b = given.wide(row);
    ++ca[a];
    ++cb[b];
    ++cab[{a, b}];
  }
  if (cab.size() != ca.size() * cb.size()) return false;
  for (const auto& [ab, n] : cab)
    if (n * static_cast<std::uint64_t>(n_rows) != ca[ab.first] * cb[ab.second]) return false;
  return true;
}

Instance build_instance(const ProblemIndex& index, const std::vector<int>& source_alphabets,
                        const std::map<std::string, int>& edge_alphabets,
                        const std::vector<std::pair<std::string, int>>& randomness) {
  const NetworkProblem& p = index.problem();
  Instance inst;
  inst.randomness = randomness;
  Layout& L = inst.layout;
  for (std::size_t i = 0; i < p.requirement.sessions.size(); ++i)
    L.add({VariableRef::Kind::kSession, p.requirement.sessions[i].id}, source_alphabets[i]);
  std::map<std::string, int> rand_alphabet;
  for (const auto& [node, a] : randomness) {
    L.add({VariableRef::Kind::kRandomness, node}, a);
    rand_alphabet[node] = a;
  }
  L.fixed_columns = static_cast<int>(L.variables.size());
  std::map<std::string, int> slot_of;
  for (const auto& e : index.edge_order()) {
    const std::string& root = index.root(e);
    int col = L.add({VariableRef::Kind::kEdge, e}, edge_alphabets.at(root));
    if (index.is_forwarding(e)) {
      inst.slots[slot_of.at(root)].copies.push_back(col);
      continue;
    }
    EdgeSlot slot;
    slot.id = e;
    slot.out = col;
    slot.alphabet = edge_alphabets.at(e);
    slot.inputs = encoder_inputs(index, e, rand_alphabet.count(index.edge(e).tail) > 0);
    for (const auto& v : slot.inputs) slot.in.push_back(L.column.at(v));
    slot.stride.assign(slot.in.size(), 1);
    for (int k = static_cast<int>(slot.in.size()) - 2; k >= 0; --k)
      slot.stride[k] = slot.stride[k + 1] * static_cast<std::size_t>(L.alphabets[slot.in[k + 1]]);
    for (int c : slot.in) slot.table_size *= static_cast<std::size_t>(L.alphabets[c]);
    slot_of[e] = static_cast<int>(inst.slots.size());
    inst.slots.push_back(std::move(slot));
  }

  // checks fire once the last root edge they read has been assigned
  auto trigger = [&](const std::vector<std::string>& edges, std::size_t check) {
    int last = -1;
    for (const auto& e : edges) last = std::max(last, slot_of.at(index.root(e)));
    if (last < 0) {
      inst.initial_checks.push_back(check);
    } else {
      inst.slots[last].checks.push_back(check);
    }
  };
  for (const auto& [sink, sessions] : index.demands()) {
    std::vector<int> given;
    for (const auto& e : index.incoming(sink)) given.push_back(L.column.at({VariableRef::Kind::kEdge, e}));
    for (const auto& s : index.sessions_at(sink)) given.push_back(L.column.at({VariableRef::Kind::kSession, s}));
    for (const auto& s : sessions) {
      inst.checks.push_back({Check::Kind::kDecode, {L.column.at({VariableRef::Kind::kSession, s})}, given,
                             "sink " + sink + " decodes " + s});
      trigger(index.incoming(sink), inst.checks.size() - 1);
    }
  }
  for (std::size_t r = 0; r < p.wiretaps.taps.size(); ++r) {
    const Tap& t = p.wiretaps.taps[r];
    if (t.sources.empty() || t.edges.empty()) continue;
    Check c{Check::Kind::kSecrecy, {}, {}, "wiretap " + std::to_string(r)};
    for (const auto& s : t.sources) c.target.push_back(L.column.at({VariableRef::Kind::kSession, s}));
    for (const auto& e : t.edges) c.given.push_back(L.column.at({VariableRef::Kind::kEdge, e}));
    inst.checks.push_back(std::move(c));
    trigger(t.edges, inst.checks.size() - 1);
  }

  inst.rows = 1;
  for (int c = 0; c < L.fixed_columns; ++c) inst.rows *= static_cast<std::size_t>(L.alphabets[c]);
  const std::size_t width = L.variables.size();
  inst.base_rows.assign(inst.rows * width, 0);
  std::vector<int> digits(L.fixed_columns, 0);
  for (std::size_t r = 0; r < inst.rows; ++r) {
    for (int c = 0; c < L.fixed_columns; ++c) inst.base_rows[r * width + c] = digits[c];
    for (int c = L.fixed_columns - 1; c >= 0; --c) {
      if (++digits[c] < L.alphabets[c]) break;
      digits[c] = 0;
    }
  }
  return inst;
}

struct Shared {
  std::uint64_t budget = 0;
  std::atomic<std::uint64_t> nodes{0};
  std::atomic<bool> out_of_budget{false};
  std::atomic<std::uint64_t> best{UINT64_MAX};
};

// Depth-first search over slots 1..end for one top-level item.
class Worker {
 public:
  Worker(const Instance& inst, Shared& shared) : inst_(inst), shared_(shared) {
    width_ = inst.layout.variables.size();
  }

  // Returns true with tables filled when an admissible completion exists.
  bool solve(const std::vector<int>& first_table, std::vector<std::vector<int>>& tables, double& partial) {
    rows_ = inst_.base_rows;
    tables_.assign(inst_.slots.size(), {});
    progress_.clear();
    partial_ = &partial;
    partial = 0.0;
    for (std::size_t c : inst_.initial_checks)
      if (!run_check(inst_.checks[c], rows_, inst_.rows, width_, inst_.layout.alphabets)) return false;
    if (inst_.slots.empty()) return true;
    if (!assign(0, first_table)) return false;
    if (dfs(1)) {
      tables = tables_;
      return true;
    }
    return false;
  }

  // Reachable input indices of a slot under current rows.
  std::vector<std::size_t> reachable(std::size_t k) const {
    const EdgeSlot& s = inst_.slots[k];
    std::vector<char> hit(s.table_size, 0);
    for (std::size_t r = 0; r < inst_.rows; ++r) hit[index_of(s, &rows_[r * width_])] = 1;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < s.table_size; ++i)
      if (hit[i]) out.push_back(i);
    return out;
  }

  void load_base() { rows_ = inst_.base_rows; }

 private:
  std::size_t index_of(const EdgeSlot& s, const int* row) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < s.in.size(); ++i) idx += static_cast<std::size_t>(row[s.in[i]]) * s.stride[i];
    return idx;
  }

  // Writes the slot's column (and copies) and runs its checks.
  bool assign(std::size_t k, const std::vector<int>& table) {
    const EdgeSlot& s = inst_.slots[k];
    tables_[k] = table;
    for (std::size_t r = 0; r < inst_.rows; ++r) {
      int* row = &rows_[r * width_];
      int v = table[index_of(s, row)];
      row[s.out] = v;
      for (int c : s.copies) row[c] = v;
    }
    for (std::size_t c : s.checks)
      if (!run_check(inst_.checks[c], rows_, inst_.rows, width_, inst_.layout.alphabets)) return false;
    return true;
  }

  void update_partial() {
    double frac = 0.0, weight = 1.0;
    for (const auto& [done, count] : progress_) {
      frac += weight * done / count;
      weight /= count;
    }
    *partial_ = frac;
  }

  bool dfs(std::size_t k) {
    if (k == inst_.slots.size()) return true;
    const EdgeSlot& s = inst_.slots[k];
    auto reach = reachable(k);
    CanonicalTables gen(static_cast<int>(reach.size()), s.alphabet);
    progress_.emplace_back(0.0, canonical_count(static_cast<int>(reach.size()), s.alphabet));
    std::vector<int> table(s.table_size, 0);
    do {
      if (shared_.out_of_budget.load()) {
        update_partial();
        progress_.pop_back();
        return false;
      }
      if (shared_.nodes.fetch_add(1) + 1 > shared_.budget) {
        shared_.out_of_budget = true;
        update_partial();
        progress_.pop_back();
        return false;
      }
      const auto& vals = gen.values();
      for (std::size_t j = 0; j < reach.size(); ++j) table[reach[j]] = vals[j];
      if (assign(k, table) && dfs(k + 1)) {
        progress_.pop_back();
        return true;
      }
      if (shared_.out_of_budget.load()) {
        update_partial();
        progress_.pop_back();
        return false;
      }
      progress_.back().first += 1.0;
    } while (gen.next());
    progress_.pop_back();
    return false;
  }

  const Instance& inst_;
  Shared& shared_;
  std::size_t width_ = 0;
  std::vector<int> rows_;
  std::vector<std::vector<int>> tables_;
  std::vector<std::pair<double, double>> progress_;
  double* partial_ = nullptr;
};

NetworkCode make_code(const ProblemIndex& index, const Instance& inst, const std::vector<int>& source_alphabets,
                      const std::map<std::string, int>& edge_alphabets,
                      const std::vector<std::vector<int>>& tables) {
  const NetworkProblem& p = index.problem();
  NetworkCode code;
  for (std::size_t i = 0; i < p.requirement.sessions.size(); ++i)
    code.source_alphabets[p.requirement.sessions[i].id] = source_alphabets[i];
  for (const auto& e : index.edge_order())
    if (!index.is_forwarding(e)) code.edge_alphabets[e] = edge_alphabets.at(e);
  for (const auto& [node, a] : inst.randomness)
    code.randomness.push_back({node, std::vector<Rational>(a, Rational(1, a))});
  for (std::size_t k = 0; k < inst.slots.size(); ++k)
    code.encoders.push_back({inst.slots[k].id, inst.slots[k].inputs, tables[k]});
  return code;
}

}  // namespace

SearchResult exhaustive_search(const NetworkProblem& problem, const SearchOptions& options) {
  if (options.alphabet_max < 1) throw std::invalid_argument("alphabet bound must be >= 1");
  ProblemIndex index(problem);
  SearchResult result;

  std::vector<int> source_alphabets;
  for (const auto& s : problem.requirement.sessions) {
    std::uint64_t a = std::max<std::uint64_t>(1, ceil_pow2(s.rate));
    if (a > 1'000'000) throw std::invalid_argument("session " + s.id + " rate too large for exhaustive search");
    source_alphabets.push_back(static_cast<int>(a));
  }
  std::map<std::string, int> edge_alphabets;
  for (const auto& e : index.edge_order()) {
    if (index.is_forwarding(e)) continue;
    const Capacity& c = index.edge(e).capacity;
    std::uint64_t a = static_cast<std::uint64_t>(options.alphabet_max);
    if (!c.is_unbounded()) a = std::min(a, floor_pow2(c.value()));
    edge_alphabets[e] = static_cast<int>(std::max<std::uint64_t>(a, 1));
  }

  std::vector<std::string> rand_nodes;
  if (options.allow_randomness) {
    rand_nodes = problem.randomness_nodes;
    if (rand_nodes.empty()) result.notes.push_back("problem permits no randomness; searching deterministic codes");
  }
  std::uint64_t combos = 1;
  for (std::size_t i = 0; i < rand_nodes.size(); ++i) combos *= static_cast<std::uint64_t>(options.alphabet_max);

  std::vector<Instance> instances;
  for (std::uint64_t c = 0; c < combos; ++c) {
    std::vector<std::pair<std::string, int>> rnd;
    std::uint64_t rest = c;
    std::vector<int> digits(rand_nodes.size(), 0);
    for (int i = static_cast<int>(rand_nodes.size()) - 1; i >= 0; --i) {
      digits[i] = static_cast<int>(rest % options.alphabet_max);
      rest /= options.alphabet_max;
    }
    for (std::size_t i = 0; i < rand_nodes.size(); ++i)
      if (digits[i] + 1 > 1) rnd.emplace_back(rand_nodes[i], digits[i] + 1);
    instances.push_back(build_instance(index, source_alphabets, edge_alphabets, rnd));
    std::uint64_t rows = instances.back().rows;
    if (rows > kDistributionBudget)
      throw BudgetExceeded("search instance has " + std::to_string(rows) + " outcomes per code");
  }
  {
    double raw = 0.0;
    for (const auto& inst : instances) {
      double space = 1.0;
      for (const auto& s : inst.slots) space *= std::pow(static_cast<double>(s.alphabet), static_cast<double>(s.table_size));
      raw += space;
    }
    result.raw_space = raw;
  }

  Shared shared;
  shared.budget = options.budget;

  // Top-level items: (configuration, first-slot table), handed out in order.
  struct Item {
    std::size_t instance;
    std::vector<int> table;
    double weight;
  };
  std::mutex mu;
  std::size_t cur_instance = 0;
  std::unique_ptr<CanonicalTables> gen;
  std::vector<std::size_t> reach;
  double cur_count = 1.0;
  std::uint64_t next_seq = 0;
  bool exhausted = false;
  const double instance_weight = 1.0 / static_cast<double>(instances.size());

  auto take = [&](Item& item, std::uint64_t& seq) -> bool {
    std::lock_guard<std::mutex> lock(mu);
    while (!exhausted) {
      if (cur_instance >= instances.size()) {
        exhausted = true;
        break;
      }
      const Instance& inst = instances[cur_instance];
      if (inst.slots.empty()) {
        item = {cur_instance, {}, instance_weight};
        seq = next_seq++;
        ++cur_instance;
        return true;
      }
      if (!gen) {
        Worker probe(inst, shared);
        probe.load_base();
        reach = probe.reachable(0);
        gen = std::make_unique<CanonicalTables>(static_cast<int>(reach.size()), inst.slots[0].alphabet);
        cur_count = canonical_count(static_cast<int>(reach.size()), inst.slots[0].alphabet);
      } else if (!gen->next()) {
        gen.reset();
        ++cur_instance;
        continue;
      }
      std::vector<int> table(inst.slots[0].table_size, 0);
      for (std::size_t j = 0; j < reach.size(); ++j) table[reach[j]] = gen->values()[j];
      item = {cur_instance, std::move(table), instance_weight / cur_count};
      seq = next_seq++;
      return true;
    }
    return false;
  };

  std::mutex result_mu;
  std::map<std::uint64_t, std::pair<std::size_t, std::vector<std::vector<int>>>> found;
  std::map<std::uint64_t, bool> completed;  // seq -> finished without interruption
  double fraction = 0.0;

  auto work = [&]() {
    Item item;
    std::uint64_t seq = 0;
    while (!shared.out_of_budget.load() && take(item, seq)) {
      if (seq > shared.best.load()) break;
      // nodes for first-slot tables are counted here
      if (!instances[item.instance].slots.empty() && shared.nodes.fetch_add(1) + 1 > shared.budget) {
        shared.out_of_budget = true;
        std::lock_guard<std::mutex> lock(result_mu);
        completed[seq] = false;
        break;
      }
      Worker w(instances[item.instance], shared);
      std::vector<std::vector<int>> tables;
      double partial = 0.0;
      bool ok = w.solve(item.table, tables, partial);
      std::lock_guard<std::mutex> lock(result_mu);
      if (ok) {
        found[seq] = {item.instance, std::move(tables)};
        std::uint64_t prev = shared.best.load();
        while (seq < prev && !shared.best.compare_exchange_weak(prev, seq)) {
        }
      }
      bool interrupted = !ok && shared.out_of_budget.load();
      completed[seq] = !interrupted;
      fraction += item.weight * (interrupted ? partial : 1.0);
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  result.nodes = shared.nodes.load();
  if (!found.empty()) {
    auto best = found.begin();
    bool certain = true;
    for (const auto& [seq, done] : completed)
      if (seq < best->first && !done) certain = false;
    if (certain) {
      const Instance& inst = instances[best->second.first];
      NetworkCode code = make_code(index, inst, source_alphabets, edge_alphabets, best->second.second);
      Verdict v = check_admissible(problem, code);
      if (!v.admissible) throw std::logic_error("search produced a code that fails the admissibility check");
      result.status = SearchResult::Status::kFound;
      result.code = std::move(code);
      result.fraction_searched = std::min(1.0, fraction);
      return result;
    }
  }
  if (shared.out_of_budget.load()) {
    result.status = SearchResult::Status::kBudgetExceeded;
    result.fraction_searched = std::min(1.0, fraction);
    return result;
  }
  result.status = SearchResult::Status::kNone;
  result.fraction_searched = 1.0;
  return result;
}

}  // namespace entroflow
