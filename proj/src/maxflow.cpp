#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/push_relabel_max_flow.hpp>

#include "domcode/domination.hpp"

namespace domcode::detail {

namespace {

using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
using FlowGraph = boost::adjacency_list<
    boost::vecS, boost::vecS, boost::directedS, boost::no_property,
    boost::property<boost::edge_capacity_t, double,
                    boost::property<boost::edge_residual_capacity_t, double,
                                    boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
using Edge = Traits::edge_descriptor;

class NetworkBuilder {
 public:
  explicit NetworkBuilder(std::size_t vertices) : g_(vertices) {}

  Edge add(std::size_t from, std::size_t to, double capacity) {
    auto cap = boost::get(boost::edge_capacity, g_);
    auto rev = boost::get(boost::edge_reverse, g_);
    Edge e = boost::add_edge(from, to, g_).first;
    Edge r = boost::add_edge(to, from, g_).first;
    cap[e] = capacity;
    cap[r] = 0.0;
    rev[e] = r;
    rev[r] = e;
    return e;
  }

  double flow(Edge e) const {
    auto cap = boost::get(boost::edge_capacity, g_);
    auto res = boost::get(boost::edge_residual_capacity, g_);
    return cap[e] - res[e];
  }

  FlowGraph& graph() { return g_; }

 private:
  FlowGraph g_;
};

}  // namespace

double lattice_max_flow(int n, std::span<const double> upper, std::span<const double> lower,
                        std::vector<double>* edge_flow, std::vector<double>* sink_flow,
                        std::vector<double>* source_flow) {
  const std::size_t states = std::size_t{1} << n;
  const std::size_t source = states;
  const std::size_t sink = states + 1;
  NetworkBuilder net(states + 2);
  // Total mass is one, so any capacity above one is effectively unbounded.
  constexpr double kUnbounded = 2.0;
  std::vector<Edge> from_source(states), to_sink(states);
  std::vector<Edge> lattice(states * static_cast<std::size_t>(n));
  std::vector<char> has_lattice(lattice.size(), 0);
  for (std::size_t x = 0; x < states; ++x) {
    from_source[x] = net.add(source, x, upper[x]);
    to_sink[x] = net.add(x, sink, lower[x]);
    for (int i = 0; i < n; ++i) {
      if (x >> i & 1) {
        lattice[x * n + i] = net.add(x, x & ~(std::size_t{1} << i), kUnbounded);
        has_lattice[x * n + i] = 1;
      }
    }
  }
  double value = boost::push_relabel_max_flow(net.graph(), source, sink);
  if (edge_flow) {
    edge_flow->assign(lattice.size(), 0.0);
    for (std::size_t k = 0; k < lattice.size(); ++k)
      if (has_lattice[k]) (*edge_flow)[k] = net.flow(lattice[k]);
  }
  if (sink_flow) {
    sink_flow->resize(states);
    for (std::size_t x = 0; x < states; ++x) (*sink_flow)[x] = net.flow(to_sink[x]);
  }
  if (source_flow) {
    source_flow->resize(states);
    for (std::size_t x = 0; x < states; ++x) (*source_flow)[x] = net.flow(from_source[x]);
  }
  return value;
}

}  // namespace domcode::detail
