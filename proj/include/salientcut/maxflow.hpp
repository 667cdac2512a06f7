#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "salientcut/pixel_grid.hpp"

namespace salientcut {

/// Residual capacities at or below this are treated as saturated.
inline constexpr double kResidualEpsilon = 1e-12;

/// Capacitated s-t graph over `node_count()` ordinary vertices. Terminal
/// links are stored per vertex; every ordinary edge owns a reverse partner.
class FlowGraph {
 public:
  struct Edge {
    std::uint32_t from;
    std::uint32_t to;
    double cap;
    double rev_cap;
  };

  explicit FlowGraph(std::size_t nodes = 0, std::size_t edge_hint = 0);

  std::size_t add_nodes(std::size_t count);
  std::size_t node_count() const { return source_cap_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Accumulates c(s, v) += source_cap and c(v, t) += sink_cap.
  void add_terminal_edges(std::size_t v, double source_cap, double sink_cap);
  /// u -> v with `cap` and v -> u with `rev_cap`; returns the edge index.
  std::size_t add_edge(std::size_t u, std::size_t v, double cap, double rev_cap);
  /// A direct s -> t edge (always cut).
  void add_source_sink_edge(double cap);

  double source_cap(std::size_t v) const { return source_cap_[v]; }
  double sink_cap(std::size_t v) const { return sink_cap_[v]; }
  double source_sink_cap() const { return source_sink_cap_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Constant carried alongside the graph (not part of the flow problem),
  /// e.g. the unary offset removed by t-link normalization.
  double offset = 0.0;

  /// DIMACS max-flow text: vertex v -> v+1, s -> n+1, t -> n+2.
  void write_dimacs(std::ostream& out) const;

 private:
  std::vector<double> source_cap_;
  std::vector<double> sink_cap_;
  std::vector<Edge> edges_;
  double source_sink_cap_ = 0.0;
};

struct CutResult {
  double flow_value = 0.0;
  /// Per ordinary vertex: 1 if reachable from s in the final residual graph.
  std::vector<std::uint8_t> source_side;
  /// Filled when requested: net flow along each added edge (from -> to) and
  /// along each terminal link.
  std::vector<double> edge_flow;
  std::vector<double> source_flow;
  std::vector<double> sink_flow;

  bool on_source_side(std::size_t v) const { return source_side[v] != 0; }
};

/// Boykov-Kolmogorov augmenting paths on two search trees with orphan
/// adoption. Single-threaded; the graph is consumed.
CutResult max_flow(FlowGraph graph, bool record_flows = false);

/// Capacity of the s-t cut induced by `source_side`.
double cut_capacity(const FlowGraph& graph, const std::vector<std::uint8_t>& source_side);

/// Label 1 (object) iff the pixel's vertex is on the source side.
LabelField labels_from_cut(const CutResult& cut, int width, int height);

}  // namespace salientcut
