#include <algorithm>

#include "apx/error.hpp"
#include "apx/errormodel.hpp"

namespace apx {

namespace {

// The adder that produces the value seen on `index`, looking through delays.
std::optional<std::size_t> producing_adder(const Netlist& net, std::size_t index) {
  for (std::size_t hops = 0; hops <= net.size(); ++hops) {
    const Node& n = net.node(index);
    if (n.is_adder()) return index;
    if (n.kind != NodeKind::Delay) return std::nullopt;
    index = net.sources(index).front();
  }
  return std::nullopt;  // a ring of delays only
}

}  // namespace

std::vector<std::optional<std::uint64_t>> median_fills(const Netlist& net, const Assignment& assignment,
                                                       AdderKind kind, bool refine) {
  std::vector<std::optional<std::uint64_t>> fills(net.size());
  if (kind != AdderKind::Median || !refine) return fills;
  for (std::size_t i : net.adder_indices()) {
    const int k = assignment[i];
    if (k <= 0) continue;
    const auto src = net.sources(i);
    AdderKind pk[2] = {AdderKind::Accurate, AdderKind::Accurate};
    int kk[2] = {0, 0};
    for (int j = 0; j < 2; ++j) {
      // A subtrahend enters complemented, so its low bits are no longer all ones.
      if (j == 1 && net.node(i).kind == NodeKind::Sub) continue;
      if (const auto p = producing_adder(net, src[static_cast<std::size_t>(j)])) {
        pk[j] = AdderKind::Median;
        kk[j] = assignment[*p];
      }
    }
    const std::uint64_t fill = ma_fill_constant(k, pk[0], kk[0], pk[1], kk[1]);
    if (fill != (std::uint64_t{1} << k) - 1) fills[i] = fill;
  }
  return fills;
}

ErrorStats adder_node_stats(const Netlist& net, std::size_t index, AdderKind kind, int k,
                            std::optional<std::uint64_t> fill, const BitProcess& src0, const BitProcess& src1,
                            ProbMode mode) {
  const bool sub = net.node(index).kind == NodeKind::Sub;
  const int n_bits = net.frac_bits();
  BitProcess a, b;
  if (mode == ProbMode::Uniform) {
    a = b = BitProcess::uniform(n_bits);
  } else {
    a = src0;
    b = sub ? src1.flipped() : src1;
    if (mode == ProbMode::Marginal) {
      a = a.independent_part();
      b = b.independent_part();
    }
  }
  AdderContext ctx;
  ctx.carry_in = sub ? 1 : 0;
  ctx.fill = fill;
  ctx.out_bits = n_bits;
  ErrorStats st = adder_stats(kind, k, a, b, ctx);
  if (mode != ProbMode::Markov || kind != AdderKind::AMA2) st.output = st.output.independent_part();
  return st;
}

Propagation propagate_probs(const Netlist& net, const Assignment& assignment, AdderKind kind,
                            const ModelOptions& options) {
  require_valid(net);
  if (assignment.size() != net.size()) throw Error(ErrorCode::InvalidArgument, "assignment does not match netlist");
  const int n_bits = net.frac_bits();
  const auto order = topological_order(net);

  Propagation res;
  res.process.assign(net.size(), BitProcess::uniform(n_bits));
  res.stats.assign(net.size(), std::nullopt);
  res.fills = median_fills(net, assignment, kind, options.refine_median);

  std::vector<std::size_t> delays;
  for (std::size_t i = 0; i < net.size(); ++i)
    if (net.node(i).kind == NodeKind::Delay) delays.push_back(i);

  constexpr int kMaxSweeps = 200;
  constexpr double kTol = 1e-12;
  for (int sweep = 1;; ++sweep) {
    for (std::size_t idx : order) {
      const Node& node = net.node(idx);
      switch (node.kind) {
        case NodeKind::Input:
        case NodeKind::Delay: break;
        case NodeKind::Output: res.process[idx] = res.process[net.sources(idx).front()]; break;
        case NodeKind::MulConst:
          res.process[idx] = mult_process_rule(*node.coefficient, res.process[net.sources(idx).front()], n_bits);
          break;
        case NodeKind::Add:
        case NodeKind::Sub: {
          const auto src = net.sources(idx);
          ErrorStats st = adder_node_stats(net, idx, kind, assignment[idx], res.fills[idx], res.process[src[0]],
                                           res.process[src[1]], options.mode);
          res.process[idx] = st.output;
          res.stats[idx] = std::move(st);
          break;
        }
      }
    }
    double change = 0.0;
    for (std::size_t d : delays) {
      const BitProcess& next = res.process[net.sources(d).front()];
      change = std::max(change, res.process[d].max_abs_diff(next));
      res.process[d] = next;
    }
    res.iterations = sweep;
    if (change <= kTol) break;
    if (sweep >= kMaxSweeps) break;  // slowly converging loop: keep the last sweep
  }
  return res;
}

}  // namespace apx
