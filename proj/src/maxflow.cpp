#include "salientcut/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

namespace salientcut {

FlowGraph::FlowGraph(std::size_t nodes, std::size_t edge_hint) : source_cap_(nodes, 0.0), sink_cap_(nodes, 0.0) {
  edges_.reserve(edge_hint);
}

std::size_t FlowGraph::add_nodes(std::size_t count) {
  const std::size_t first = source_cap_.size();
  source_cap_.resize(first + count, 0.0);
  sink_cap_.resize(first + count, 0.0);
  return first;
}

void FlowGraph::add_terminal_edges(std::size_t v, double source_cap, double sink_cap) {
  if (v >= node_count()) throw InvalidArgument("FlowGraph: vertex index out of range");
  if (!(source_cap >= 0.0) || !(sink_cap >= 0.0) || !std::isfinite(source_cap) || !std::isfinite(sink_cap))
    throw InvalidArgument("FlowGraph: terminal capacities must be finite and >= 0");
  source_cap_[v] += source_cap;
  sink_cap_[v] += sink_cap;
}

std::size_t FlowGraph::add_edge(std::size_t u, std::size_t v, double cap, double rev_cap) {
  if (u >= node_count() || v >= node_count()) throw InvalidArgument("FlowGraph: vertex index out of range");
  if (u == v) throw InvalidArgument("FlowGraph: self-loops are not allowed");
  if (!(cap >= 0.0) || !(rev_cap >= 0.0) || !std::isfinite(cap) || !std::isfinite(rev_cap))
    throw InvalidArgument("FlowGraph: edge capacities must be finite and >= 0");
  edges_.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v), cap, rev_cap});
  return edges_.size() - 1;
}

void FlowGraph::add_source_sink_edge(double cap) {
  if (!(cap >= 0.0) || !std::isfinite(cap)) throw InvalidArgument("FlowGraph: capacity must be finite and >= 0");
  source_sink_cap_ += cap;
}

void FlowGraph::write_dimacs(std::ostream& out) const {
  const std::size_t n = node_count();
  std::size_t arcs = source_sink_cap_ > 0 ? 1 : 0;
  for (std::size_t v = 0; v < n; ++v) arcs += (source_cap_[v] > 0) + (sink_cap_[v] > 0);
  for (const auto& e : edges_) arcs += (e.cap > 0) + (e.rev_cap > 0);
  out.precision(17);
  out << "c salientcut flow graph\n";
  out << "p max " << n + 2 << ' ' << arcs << '\n';
  out << "n " << n + 1 << " s\n";
  out << "n " << n + 2 << " t\n";
  if (source_sink_cap_ > 0) out << "a " << n + 1 << ' ' << n + 2 << ' ' << source_sink_cap_ << '\n';
  for (std::size_t v = 0; v < n; ++v) {
    if (source_cap_[v] > 0) out << "a " << n + 1 << ' ' << v + 1 << ' ' << source_cap_[v] << '\n';
    if (sink_cap_[v] > 0) out << "a " << v + 1 << ' ' << n + 2 << ' ' << sink_cap_[v] << '\n';
  }
  for (const auto& e : edges_) {
    if (e.cap > 0) out << "a " << e.from + 1 << ' ' << e.to + 1 << ' ' << e.cap << '\n';
    if (e.rev_cap > 0) out << "a " << e.to + 1 << ' ' << e.from + 1 << ' ' << e.rev_cap << '\n';
  }
}

namespace {

class BkSolver {
 public:
  explicit BkSolver(const FlowGraph& g) : n_(static_cast<int>(g.node_count())) {
    const auto& edges = g.edges();
    const std::size_t m = edges.size();
    // CSR layout: arcs grouped by tail, insertion order within a tail.
    first_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (const auto& e : edges) {
      ++first_[e.from + 1];
      ++first_[e.to + 1];
    }
    for (int v = 0; v < n_; ++v) first_[v + 1] += first_[v];
    head_.resize(2 * m);
    sister_.resize(2 * m);
    rcap_.resize(2 * m);
    forward_arc_.resize(m);
    std::vector<int> fill(first_.begin(), first_.end() - 1);
    for (std::size_t k = 0; k < m; ++k) {
      const auto& e = edges[k];
      const int a = fill[e.from]++;
      const int b = fill[e.to]++;
      head_[a] = static_cast<int>(e.to);
      head_[b] = static_cast<int>(e.from);
      sister_[a] = b;
      sister_[b] = a;
      rcap_[a] = e.cap;
      rcap_[b] = e.rev_cap;
      forward_arc_[k] = a;
    }
    trcap_.resize(n_);
    flow_ = g.source_sink_cap();
    for (int v = 0; v < n_; ++v) {
      const double cs = g.source_cap(v), ct = g.sink_cap(v);
      flow_ += std::min(cs, ct);
      trcap_[v] = cs - ct;
    }
    parent_.assign(n_, kNone);
    ts_.assign(n_, 0);
    dist_.assign(n_, 0);
    is_sink_.assign(n_, 0);
    queued_.assign(n_, 0);
  }

  void solve() {
    for (int v = 0; v < n_; ++v) {
      if (trcap_[v] > kResidualEpsilon) {
        is_sink_[v] = 0;
        parent_[v] = kTerminal;
        set_active(v);
        dist_[v] = 1;
      } else if (trcap_[v] < -kResidualEpsilon) {
        is_sink_[v] = 1;
        parent_[v] = kTerminal;
        set_active(v);
        dist_[v] = 1;
      }
    }
    int current = -1;
    for (;;) {
      int i = -1;
      if (current >= 0) {
        i = current;
        current = -1;
        if (parent_[i] == kNone) i = -1;
      }
      if (i < 0 && (i = next_active()) < 0) break;

      int middle = -1;
      if (!is_sink_[i]) {
        for (int a = first_[i]; a < first_[i + 1]; ++a) {
          if (rcap_[a] <= kResidualEpsilon) continue;
          const int j = head_[a];
          if (parent_[j] == kNone) {
            is_sink_[j] = 0;
            parent_[j] = sister_[a];
            ts_[j] = ts_[i];
            dist_[j] = dist_[i] + 1;
            set_active(j);
          } else if (is_sink_[j]) {
            middle = a;
            break;
          } else if (ts_[j] <= ts_[i] && dist_[j] > dist_[i]) {
            parent_[j] = sister_[a];
            ts_[j] = ts_[i];
            dist_[j] = dist_[i] + 1;
          }
        }
      } else {
        for (int a = first_[i]; a < first_[i + 1]; ++a) {
          if (rcap_[sister_[a]] <= kResidualEpsilon) continue;
          const int j = head_[a];
          if (parent_[j] == kNone) {
            is_sink_[j] = 1;
            parent_[j] = sister_[a];
            ts_[j] = ts_[i];
            dist_[j] = dist_[i] + 1;
            set_active(j);
          } else if (!is_sink_[j]) {
            middle = sister_[a];
            break;
          } else if (ts_[j] <= ts_[i] && dist_[j] > dist_[i]) {
            parent_[j] = sister_[a];
            ts_[j] = ts_[i];
            dist_[j] = dist_[i] + 1;
          }
        }
      }

      ++time_;
      if (middle >= 0) {
        current = i;
        augment(middle);
        while (!orphans_.empty()) {
          const int o = orphans_.front();
          orphans_.pop_front();
          if (is_sink_[o])
            process_sink_orphan(o);
          else
            process_source_orphan(o);
        }
      }
    }
  }

  CutResult result(const FlowGraph& g, bool record_flows) const {
    CutResult r;
    r.flow_value = flow_;
    r.source_side.assign(n_, 0);
    std::vector<int> stack;
    for (int v = 0; v < n_; ++v)
      if (trcap_[v] > kResidualEpsilon) {
        r.source_side[v] = 1;
        stack.push_back(v);
      }
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int a = first_[v]; a < first_[v + 1]; ++a) {
        const int j = head_[a];
        if (!r.source_side[j] && rcap_[a] > kResidualEpsilon) {
          r.source_side[j] = 1;
          stack.push_back(j);
        }
      }
    }
    if (record_flows) {
      const auto& edges = g.edges();
      r.edge_flow.resize(edges.size());
      for (std::size_t k = 0; k < edges.size(); ++k) r.edge_flow[k] = edges[k].cap - rcap_[forward_arc_[k]];
      r.source_flow.resize(n_);
      r.sink_flow.resize(n_);
      for (int v = 0; v < n_; ++v) {
        r.source_flow[v] = g.source_cap(v) - std::max(trcap_[v], 0.0);
        r.sink_flow[v] = g.sink_cap(v) - std::max(-trcap_[v], 0.0);
      }
    }
    return r;
  }

 private:
  static constexpr int kNone = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;
  static constexpr int kInfiniteDist = std::numeric_limits<int>::max();

  void set_active(int v) {
    if (!queued_[v]) {
      queued_[v] = 1;
      active_.push_back(v);
    }
  }

  int next_active() {
    while (!active_.empty()) {
      const int v = active_.front();
      active_.pop_front();
      queued_[v] = 0;
      if (parent_[v] != kNone) return v;
    }
    return -1;
  }

  void set_orphan_front(int v) {
    parent_[v] = kOrphan;
    orphans_.push_front(v);
  }
  void set_orphan_rear(int v) {
    parent_[v] = kOrphan;
    orphans_.push_back(v);
  }

  void augment(int middle) {
    double b = rcap_[middle];
    int i = head_[sister_[middle]];
    for (int a; (a = parent_[i]) != kTerminal; i = head_[a]) b = std::min(b, rcap_[sister_[a]]);
    b = std::min(b, trcap_[i]);
    i = head_[middle];
    for (int a; (a = parent_[i]) != kTerminal; i = head_[a]) b = std::min(b, rcap_[a]);
    b = std::min(b, -trcap_[i]);

    rcap_[sister_[middle]] += b;
    rcap_[middle] -= b;
    i = head_[sister_[middle]];
    for (int a; (a = parent_[i]) != kTerminal; i = head_[a]) {
      rcap_[a] += b;
      rcap_[sister_[a]] -= b;
      if (rcap_[sister_[a]] <= kResidualEpsilon) set_orphan_front(i);
    }
    trcap_[i] -= b;
    if (trcap_[i] <= kResidualEpsilon) set_orphan_front(i);
    i = head_[middle];
    for (int a; (a = parent_[i]) != kTerminal; i = head_[a]) {
      rcap_[sister_[a]] += b;
      rcap_[a] -= b;
      if (rcap_[a] <= kResidualEpsilon) set_orphan_front(i);
    }
    trcap_[i] += b;
    if (-trcap_[i] <= kResidualEpsilon) set_orphan_front(i);
    flow_ += b;
  }

  // Length of the path from j to its terminal, or kInfiniteDist when the
  // path runs into an orphan. Marks the path with the current timestamp.
  int origin_distance(int j) {
    int d = 0;
    int k = j;
    for (;;) {
      if (ts_[k] == time_) {
        d += dist_[k];
        break;
      }
      const int a = parent_[k];
      ++d;
      if (a == kTerminal) {
        ts_[k] = time_;
        dist_[k] = 1;
        break;
      }
      if (a == kOrphan) return kInfiniteDist;
      k = head_[a];
    }
    int dd = d;
    for (k = j; ts_[k] != time_; k = head_[parent_[k]]) {
      ts_[k] = time_;
      dist_[k] = dd--;
    }
    return d;
  }

  void process_source_orphan(int i) {
    int best_arc = -1, best_d = kInfiniteDist;
    for (int a0 = first_[i]; a0 < first_[i + 1]; ++a0) {
      if (rcap_[sister_[a0]] <= kResidualEpsilon) continue;
      const int j = head_[a0];
      if (is_sink_[j] || parent_[j] == kNone) continue;
      const int d = origin_distance(j);
      if (d < best_d) {
        best_d = d;
        best_arc = a0;
      }
    }
    if (best_arc >= 0) {
      parent_[i] = best_arc;
      ts_[i] = time_;
      dist_[i] = best_d + 1;
      return;
    }
    for (int a0 = first_[i]; a0 < first_[i + 1]; ++a0) {
      const int j = head_[a0];
      if (is_sink_[j] || parent_[j] == kNone) continue;
      if (rcap_[sister_[a0]] > kResidualEpsilon) set_active(j);
      const int a = parent_[j];
      if (a != kTerminal && a != kOrphan && head_[a] == i) set_orphan_rear(j);
    }
    parent_[i] = kNone;
  }

  void process_sink_orphan(int i) {
    int best_arc = -1, best_d = kInfiniteDist;
    for (int a0 = first_[i]; a0 < first_[i + 1]; ++a0) {
      if (rcap_[a0] <= kResidualEpsilon) continue;
      const int j = head_[a0];
      if (!is_sink_[j] || parent_[j] == kNone) continue;
      const int d = origin_distance(j);
      if (d < best_d) {
        best_d = d;
        best_arc = a0;
      }
    }
    if (best_arc >= 0) {
      parent_[i] = best_arc;
      ts_[i] = time_;
      dist_[i] = best_d + 1;
      return;
    }
    for (int a0 = first_[i]; a0 < first_[i + 1]; ++a0) {
      const int j = head_[a0];
      if (!is_sink_[j] || parent_[j] == kNone) continue;
      if (rcap_[a0] > kResidualEpsilon) set_active(j);
      const int a = parent_[j];
      if (a != kTerminal && a != kOrphan && head_[a] == i) set_orphan_rear(j);
    }
    parent_[i] = kNone;
  }

  int n_;
  std::vector<int> first_;
  std::vector<int> head_;
  std::vector<int> sister_;
  std::vector<double> rcap_;
  std::vector<int> forward_arc_;
  std::vector<double> trcap_;
  std::vector<int> parent_;
  std::vector<long long> ts_;
  std::vector<int> dist_;
  std::vector<std::uint8_t> is_sink_;
  std::vector<std::uint8_t> queued_;
  std::deque<int> active_;
  std::deque<int> orphans_;
  long long time_ = 0;
  double flow_ = 0.0;
};

}  // namespace

CutResult max_flow(FlowGraph graph, bool record_flows) {
  BkSolver solver(graph);
  solver.solve();
  return solver.result(graph, record_flows);
}

double cut_capacity(const FlowGraph& graph, const std::vector<std::uint8_t>& source_side) {
  if (source_side.size() != graph.node_count()) throw InvalidArgument("cut_capacity: side vector size mismatch");
  double cap = graph.source_sink_cap();
  for (std::size_t v = 0; v < graph.node_count(); ++v)
    cap += source_side[v] ? graph.sink_cap(v) : graph.source_cap(v);
  for (const auto& e : graph.edges()) {
    if (source_side[e.from] && !source_side[e.to]) cap += e.cap;
    if (source_side[e.to] && !source_side[e.from]) cap += e.rev_cap;
  }
  return cap;
}

LabelField labels_from_cut(const CutResult& cut, int width, int height) {
  if (width < 0 || height < 0 ||
      cut.source_side.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw InvalidArgument("labels_from_cut: cut does not match a " + std::to_string(width) + "x" +
                          std::to_string(height) + " grid");
  LabelField out(width, height);
  for (std::size_t i = 0; i < out.labels.size(); ++i) out.labels[i] = cut.source_side[i] ? 1 : 0;
  return out;
}

}  // namespace salientcut
