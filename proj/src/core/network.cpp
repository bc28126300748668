#include "core/network.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>
#include <stdexcept>

namespace entroflow {

std::string to_string(const Capacity& c) { return c.is_unbounded() ? "unbounded" : to_string(c.value()); }

std::string VariableRef::name() const {
  switch (kind) {
    case Kind::kSession: return "T_" + id;
    case Kind::kEdge: return "W_" + id;
    case Kind::kRandomness: return "V_" + id;
  }
  return id;
}

RateCapacityTuple rate_capacity_tuple(const NetworkProblem& p) {
  RateCapacityTuple t;
  for (const auto& s : p.requirement.sessions) t.rates[s.id] = s.rate;
  for (const auto& e : p.network.edges) t.capacities[e.id] = e.capacity;
  return t;
}

NetworkProblem with_tuple(NetworkProblem p, const RateCapacityTuple& t) {
  for (auto& s : p.requirement.sessions) {
    auto it = t.rates.find(s.id);
    if (it == t.rates.end()) throw std::invalid_argument("rate-capacity tuple lacks session " + s.id);
    s.rate = it->second;
  }
  for (auto& e : p.network.edges) {
    auto it = t.capacities.find(e.id);
    if (it == t.capacities.end()) throw std::invalid_argument("rate-capacity tuple lacks edge " + e.id);
    e.capacity = it->second;
  }
  return p;
}

namespace {

// Kahn's algorithm over nodes; returns the nodes left on a cycle (empty if acyclic).
std::vector<std::string> cyclic_nodes(const NetworkProblem& p) {
  std::map<std::string, int> indeg;
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& n : p.network.nodes) indeg[n] = 0;
  for (const auto& e : p.network.edges) {
    if (!indeg.count(e.tail) || !indeg.count(e.head)) continue;
    succ[e.tail].push_back(e.head);
    ++indeg[e.head];
  }
  std::deque<std::string> ready;
  for (const auto& [n, d] : indeg)
    if (d == 0) ready.push_back(n);
  while (!ready.empty()) {
    auto n = ready.front();
    ready.pop_front();
    for (const auto& m : succ[n])
      if (--indeg[m] == 0) ready.push_back(m);
  }
  std::vector<std::string> left;
  for (const auto& [n, d] : indeg)
    if (d > 0) left.push_back(n);
  return left;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace

std::vector<std::string> validate(const NetworkProblem& p) {
  std::vector<std::string> errors;
  std::set<std::string> nodes;
  for (const auto& n : p.network.nodes)
    if (!nodes.insert(n).second) errors.push_back("duplicate node: " + n);
  std::map<std::string, const Edge*> edges;
  for (const auto& e : p.network.edges) {
    if (!edges.emplace(e.id, &e).second) errors.push_back("duplicate edge id: " + e.id);
    if (!nodes.count(e.tail)) errors.push_back("unknown node: " + e.tail + " (tail of edge " + e.id + ")");
    if (!nodes.count(e.head)) errors.push_back("unknown node: " + e.head + " (head of edge " + e.id + ")");
    if (!e.capacity.is_unbounded() && sgn(e.capacity.value()) < 0)
      errors.push_back("negative capacity on edge " + e.id);
  }
  for (const auto& e : p.network.edges) {
    if (!e.forwards) continue;
    auto it = edges.find(*e.forwards);
    if (it == edges.end()) {
      errors.push_back("edge " + e.id + " forwards unknown edge " + *e.forwards);
    } else if (it->second->head != e.tail) {
      errors.push_back("edge " + e.id + " forwards " + *e.forwards + " which does not enter node " + e.tail);
    }
  }
  auto cyc = cyclic_nodes(p);
  if (!cyc.empty()) errors.push_back("cycle detected: " + join(cyc));

  std::set<std::string> sessions;
  for (const auto& s : p.requirement.sessions) {
    if (!sessions.insert(s.id).second) errors.push_back("duplicate session id: " + s.id);
    if (sgn(s.rate) < 0) errors.push_back("negative rate for session " + s.id);
    if (!nodes.count(s.origin)) errors.push_back("unknown node: " + s.origin + " (origin of session " + s.id + ")");
    for (const auto& d : s.sinks) {
      if (!nodes.count(d)) errors.push_back("unknown node: " + d + " (sink of session " + s.id + ")");
      if (d == s.origin) errors.push_back("sink " + d + " is co-located with the origin of session " + s.id);
    }
  }
  if (!p.requirement.incremental_order.empty()) {
    std::set<std::string> seen;
    for (const auto& s : p.requirement.incremental_order) {
      if (!sessions.count(s)) errors.push_back("incremental order names unknown session " + s);
      if (!seen.insert(s).second) errors.push_back("incremental order repeats session " + s);
    }
    if (seen.size() != sessions.size()) errors.push_back("incremental order must list every session exactly once");
    // expanded demands may not ask a node for a session it originates
    for (const auto& s : p.requirement.sessions) {
      auto pos = std::find(p.requirement.incremental_order.begin(), p.requirement.incremental_order.end(), s.id);
      for (auto it = p.requirement.incremental_order.begin(); it != pos && pos != p.requirement.incremental_order.end(); ++it)
        for (const auto& lower : p.requirement.sessions)
          if (lower.id == *it)
            for (const auto& d : s.sinks)
              if (d == lower.origin)
                errors.push_back("sink " + d + " is co-located with the origin of session " + lower.id);
    }
  }
  for (std::size_t r = 0; r < p.wiretaps.taps.size(); ++r) {
    const auto& t = p.wiretaps.taps[r];
    for (const auto& s : t.sources)
      if (!sessions.count(s)) errors.push_back("wiretap " + std::to_string(r) + " names unknown session " + s);
    for (const auto& e : t.edges)
      if (!edges.count(e)) errors.push_back("wiretap " + std::to_string(r) + " names unknown edge " + e);
  }
  for (const auto& n : p.randomness_nodes)
    if (!nodes.count(n)) errors.push_back("unknown node: " + n + " (randomness)");
  return errors;
}

void require_valid(const NetworkProblem& p) {
  auto errors = validate(p);
  if (errors.empty()) return;
  std::string msg = "invalid network problem:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw std::invalid_argument(msg);
}

std::vector<VariableRef> ancestral_order(const NetworkProblem& p) {
  std::map<std::string, int> pending;  // node -> number of unplaced incoming edges
  for (const auto& n : p.network.nodes) pending[n] = 0;
  for (const auto& e : p.network.edges) ++pending[e.head];
  std::map<std::string, std::vector<const Edge*>> out_edges;
  for (const auto& e : p.network.edges) out_edges[e.tail].push_back(&e);

  std::vector<VariableRef> order;
  for (const auto& s : p.requirement.sessions) order.push_back({VariableRef::Kind::kSession, s.id});

  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  std::map<std::string, const Edge*> by_id;
  for (const auto& e : p.network.edges) by_id[e.id] = &e;
  for (const auto& [n, k] : pending)
    if (k == 0)
      for (const Edge* e : out_edges[n]) ready.push(e->id);
  std::size_t placed = 0;
  while (!ready.empty()) {
    std::string id = ready.top();
    ready.pop();
    order.push_back({VariableRef::Kind::kEdge, id});
    ++placed;
    const Edge* e = by_id[id];
    if (--pending[e->head] == 0)
      for (const Edge* next : out_edges[e->head]) ready.push(next->id);
  }
  if (placed != p.network.edges.size()) throw std::invalid_argument("ancestral order: network has a cycle");
  return order;
}

Capacity min_cut(const NetworkProblem& p, const std::string& from, const std::string& to) {
  std::map<std::string, int> idx;
  for (const auto& n : p.network.nodes) idx.emplace(n, static_cast<int>(idx.size()));
  if (!idx.count(from) || !idx.count(to)) throw std::invalid_argument("min_cut: unknown node");
  if (from == to) return Capacity::unbounded();
  const int n = static_cast<int>(idx.size());

  // unbounded-only reachability decides the Unbounded case
  {
    std::vector<char> seen(n, 0);
    std::deque<int> q{idx[from]};
    seen[idx[from]] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (const auto& e : p.network.edges) {
        if (!e.capacity.is_unbounded() || idx[e.tail] != u) continue;
        int v = idx[e.head];
        if (!seen[v]) {
          seen[v] = 1;
          q.push_back(v);
        }
      }
    }
    if (seen[idx[to]]) return Capacity::unbounded();
  }

  Rational big = 1;
  for (const auto& e : p.network.edges)
    if (!e.capacity.is_unbounded()) big += e.capacity.value();

  // residual graph with paired arcs (Edmonds-Karp)
  struct Arc {
    int to;
    Rational residual;
    int rev;
  };
  std::vector<std::vector<Arc>> g(n);
  for (const auto& e : p.network.edges) {
    int u = idx[e.tail], v = idx[e.head];
    Rational c = e.capacity.is_unbounded() ? big : e.capacity.value();
    g[u].push_back({v, c, static_cast<int>(g[v].size())});
    g[v].push_back({u, 0, static_cast<int>(g[u].size()) - 1});
  }
  const int s = idx[from], t = idx[to];
  Rational flow = 0;
  while (true) {
    std::vector<std::pair<int, int>> parent(n, {-1, -1});
    std::deque<int> q{s};
    parent[s] = {s, -1};
    while (!q.empty() && parent[t].first < 0) {
      int u = q.front();
      q.pop_front();
      for (int k = 0; k < static_cast<int>(g[u].size()); ++k) {
        const Arc& a = g[u][k];
        if (sgn(a.residual) > 0 && parent[a.to].first < 0) {
          parent[a.to] = {u, k};
          q.push_back(a.to);
        }
      }
    }
    if (parent[t].first < 0) break;
    Rational aug = -1;
    for (int v = t; v != s; v = parent[v].first) {
      const Arc& a = g[parent[v].first][parent[v].second];
      if (sgn(aug) < 0 || a.residual < aug) aug = a.residual;
    }
    for (int v = t; v != s; v = parent[v].first) {
      Arc& a = g[parent[v].first][parent[v].second];
      a.residual -= aug;
      g[a.to][a.rev].residual += aug;
    }
    flow += aug;
  }
  return Capacity(flow);
}

// --- ProblemIndex ---------------------------------------------------------------

ProblemIndex::ProblemIndex(const NetworkProblem& p) : problem_(&p) {
  require_valid(p);
  for (std::size_t i = 0; i < p.network.edges.size(); ++i) edge_pos_[p.network.edges[i].id] = i;
  for (std::size_t i = 0; i < p.requirement.sessions.size(); ++i) session_pos_[p.requirement.sessions[i].id] = i;
  for (const auto& n : p.network.nodes) {
    incoming_[n];
    outgoing_[n];
    sessions_at_[n];
  }
  for (const auto& v : ancestral_order(p)) {
    if (v.kind != VariableRef::Kind::kEdge) continue;
    edge_order_.push_back(v.id);
    const Edge& e = edge(v.id);
    incoming_[e.head].push_back(e.id);
    outgoing_[e.tail].push_back(e.id);
  }
  for (const auto& s : p.requirement.sessions) sessions_at_[s.origin].push_back(s.id);
  for (const auto& id : edge_order_) {
    const Edge& e = edge(id);
    root_[id] = e.forwards ? root_.at(*e.forwards) : id;
  }
  randomness_.insert(p.randomness_nodes.begin(), p.randomness_nodes.end());

  const auto& order = p.requirement.incremental_order;
  for (const auto& s : p.requirement.sessions) {
    for (const auto& d : s.sinks) {
      auto& dem = demands_[d];
      auto add = [&](const std::string& sid) {
        if (std::find(dem.begin(), dem.end(), sid) == dem.end()) dem.push_back(sid);
      };
      if (!order.empty()) {
        for (const auto& lower : order) {
          add(lower);
          if (lower == s.id) break;
        }
      }
      add(s.id);
    }
  }
  for (auto& [d, dem] : demands_)
    std::sort(dem.begin(), dem.end(), [&](const std::string& a, const std::string& b) {
      return session_pos_.at(a) < session_pos_.at(b);
    });
}

const Edge& ProblemIndex::edge(const std::string& id) const {
  auto it = edge_pos_.find(id);
  if (it == edge_pos_.end()) throw std::invalid_argument("unknown edge " + id);
  return problem_->network.edges[it->second];
}

const Session& ProblemIndex::session(const std::string& id) const {
  auto it = session_pos_.find(id);
  if (it == session_pos_.end()) throw std::invalid_argument("unknown session " + id);
  return problem_->requirement.sessions[it->second];
}

const std::vector<std::string>& ProblemIndex::incoming(const std::string& node) const { return incoming_.at(node); }
const std::vector<std::string>& ProblemIndex::outgoing(const std::string& node) const { return outgoing_.at(node); }
const std::vector<std::string>& ProblemIndex::sessions_at(const std::string& node) const {
  return sessions_at_.at(node);
}
const std::string& ProblemIndex::root(const std::string& edge_id) const {
  auto it = root_.find(edge_id);
  if (it == root_.end()) throw std::invalid_argument("unknown edge " + edge_id);
  return it->second;
}

}  // namespace entroflow
