#include "apx/optimizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_map>

#include "apx/error.hpp"

namespace apx {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h * 0xff51afd7ed558ccdULL;
}

std::uint64_t mix_double(std::uint64_t h, double d) { return mix(h, std::bit_cast<std::uint64_t>(d)); }

std::uint64_t process_hash(const BitProcess& p) {
  std::uint64_t h = mix(0x12345, static_cast<std::uint64_t>(p.size()));
  for (int i = 0; i < p.size(); ++i) {
    h = mix_double(h, p.marginal(i));
    if (i > 0 && p.mode() == BitProcess::Mode::Markov) {
      h = mix_double(h, p.cond(i, 0));
      h = mix_double(h, p.cond(i, 1));
    }
  }
  return h;
}

// Node order that respects every edge, delays included. Empty when the
// netlist has feedback.
std::vector<std::size_t> feedforward_order(const Netlist& net) {
  std::vector<int> indeg(net.size(), 0);
  std::vector<std::vector<std::size_t>> fanout(net.size());
  for (std::size_t i = 0; i < net.size(); ++i)
    for (auto s : net.sources(i)) {
      fanout[s].push_back(i);
      ++indeg[i];
    }
  std::vector<std::size_t> ready, order;
  for (std::size_t i = 0; i < net.size(); ++i)
    if (indeg[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    const auto n = ready.back();
    ready.pop_back();
    order.push_back(n);
    for (auto f : fanout[n])
      if (--indeg[f] == 0) ready.push_back(f);
  }
  if (order.size() != net.size()) order.clear();
  return order;
}

}  // namespace

struct ModelEvaluator::Impl {
  const Netlist& net;
  AdderKind kind;
  ModelOptions options;
  const GainTable& gains;
  std::vector<std::vector<std::size_t>> src;
  std::vector<std::size_t> order;  // empty for feedback netlists
  std::vector<std::size_t> adders;

  bool have_base = false;
  Assignment base;
  std::vector<std::optional<std::uint64_t>> base_fills;
  std::vector<BitProcess> process;
  std::vector<const ErrorStats*> stats;
  std::unordered_map<std::uint64_t, ErrorStats> cache;
  std::vector<ErrorStats> owned;  // feedback netlists only

  Impl(const Netlist& n, AdderKind k, ModelOptions o, const GainTable& g)
      : net(n), kind(k), options(o), gains(g), src(n.size()), order(feedforward_order(n)), adders(n.adder_indices()) {
    for (std::size_t i = 0; i < n.size(); ++i) src[i] = n.sources(i);
  }

  const ErrorStats* node_stats(std::size_t i, int k, std::optional<std::uint64_t> fill) {
    std::uint64_t key = mix(static_cast<std::uint64_t>(k), net.node(i).kind == NodeKind::Sub ? 1 : 0);
    key = mix(key, fill ? *fill + 1 : 0);
    if (options.mode != ProbMode::Uniform) {
      key = mix(key, process_hash(process[src[i][0]]));
      key = mix(key, process_hash(process[src[i][1]]));
    }
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache
               .emplace(key, adder_node_stats(net, i, kind, k, fill, process[src[i][0]], process[src[i][1]],
                                              options.mode))
               .first;
    }
    return &it->second;
  }

  void evaluate(const Assignment& a) {
    if (order.empty()) {
      // Feedback: fixed-point iteration over the whole netlist.
      auto prop = propagate_probs(net, a, kind, options);
      owned.assign(net.size(), ErrorStats{});
      stats.assign(net.size(), nullptr);
      for (auto i : adders) {
        owned[i] = std::move(*prop.stats[i]);
        stats[i] = &owned[i];
      }
      return;
    }
    const auto fills = median_fills(net, a, kind, options.refine_median);
    const int n_bits = net.frac_bits();
    if (!have_base) {
      process.assign(net.size(), BitProcess::uniform(n_bits));
      stats.assign(net.size(), nullptr);
    }
    std::vector<char> dirty(net.size(), 0);
    for (auto i : order) {
      const Node& node = net.node(i);
      bool d = !have_base || (node.is_adder() && (a[i] != base[i] || fills[i] != base_fills[i]));
      for (auto s : src[i]) d = d || dirty[s];
      if (!d) continue;
      dirty[i] = 1;
      switch (node.kind) {
        case NodeKind::Input: process[i] = BitProcess::uniform(n_bits); break;
        case NodeKind::Delay:
        case NodeKind::Output: process[i] = process[src[i][0]]; break;
        case NodeKind::MulConst: process[i] = mult_process_rule(*node.coefficient, process[src[i][0]], n_bits); break;
        case NodeKind::Add:
        case NodeKind::Sub:
          stats[i] = node_stats(i, a[i], fills[i]);
          process[i] = stats[i]->output;
          break;
      }
    }
    base = a;
    base_fills = fills;
    have_base = true;
    // Entries are referenced from `stats`; a reset forces a full recompute.
    if (cache.size() > 200000) {
      cache.clear();
      have_base = false;
      evaluate(a);
    }
  }

  std::vector<double> mse(const Assignment& a) {
    evaluate(a);
    const double lsb2 = std::ldexp(1.0, -2 * net.frac_bits());
    std::vector<double> out(gains.outputs().size());
    for (std::size_t o = 0; o < out.size(); ++o) {
      double m = 0.0, v = 0.0;
      for (auto i : gains.cone(o)) {
        const auto& g = gains.gain(i, o);
        m += stats[i]->mean * g.dc_gain;
        v += stats[i]->var() * g.energy;
      }
      out[o] = (m * m + v) * lsb2;
    }
    return out;
  }
};

ModelEvaluator::ModelEvaluator(const Netlist& netlist, AdderKind kind, ModelOptions options, const GainTable& gains)
    : impl_(new Impl(netlist, kind, options, gains)) {}

ModelEvaluator::~ModelEvaluator() { delete impl_; }

std::vector<double> ModelEvaluator::output_mse(const Assignment& assignment) { return impl_->mse(assignment); }

NoiseReport ModelEvaluator::report(const Assignment& assignment) {
  return analyze(impl_->net, assignment, impl_->kind, impl_->gains, impl_->options);
}

std::vector<double> output_budgets(const Netlist& net, const OptimizeConfig& config) {
  const auto outs = net.output_indices();
  if (config.target_db.empty()) throw Error(ErrorCode::InvalidArgument, "no target given");
  if (config.target_db.size() != 1 && config.target_db.size() != outs.size()) {
    throw Error(ErrorCode::InvalidArgument, "expected 1 or " + std::to_string(outs.size()) + " targets, got " +
                                                std::to_string(config.target_db.size()));
  }
  std::vector<double> b(outs.size());
  for (std::size_t o = 0; o < outs.size(); ++o) {
    const double db = config.target_db.size() == 1 ? config.target_db[0] : config.target_db[o];
    if (!std::isfinite(db)) throw Error(ErrorCode::InvalidArgument, "target must be a finite dB value");
    b[o] = std::pow(10.0, db / 10.0);
  }
  return b;
}

namespace {

constexpr double kSlack = 1e-12;

class Search {
 public:
  Search(const Netlist& net, const GainTable& gains, const OptimizeConfig& cfg)
      : net_(net),
        gains_(gains),
        cfg_(cfg),
        eval_(net, cfg.kind, cfg.model, gains),
        budget_(output_budgets(net, cfg)),
        movable_(net.size(), false) {
    if (cfg.tabu_tenure < 1) throw Error(ErrorCode::InvalidArgument, "tabu tenure must be at least 1");
    if (cfg.max_tabu_iters < 0) throw Error(ErrorCode::InvalidArgument, "tabu iteration count must be non-negative");
    for (std::size_t o = 0; o < gains.outputs().size(); ++o) constrained_.push_back(o);
    for (auto a : net.adder_indices()) movable_[a] = true;
    // Tie-break rank: id order, or a seeded permutation of it.
    std::vector<std::size_t> ids = net.adder_indices();
    std::sort(ids.begin(), ids.end(), [&](auto x, auto y) { return net.node(x).id < net.node(y).id; });
    rank_.assign(net.size(), 0);
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    for (std::size_t r = 0; r < ids.size(); ++r) {
      std::uint64_t key = r;
      if (cfg.seed != 0) {
        key = cfg.seed;
        for (char c : net.node(ids[r]).id) key = mix(key, static_cast<unsigned char>(c));
      }
      keyed.emplace_back(key, ids[r]);
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t r = 0; r < keyed.size(); ++r) rank_[keyed[r].second] = r;
    id_rank_.assign(net.size(), 0);
    for (std::size_t r = 0; r < ids.size(); ++r) id_rank_[ids[r]] = r;
  }

  void restrict(const std::vector<std::size_t>& constrained, const std::vector<bool>& movable) {
    constrained_ = constrained;
    movable_ = movable;
  }

  double worst_ratio(const Assignment& a) {
    const auto m = eval_.output_mse(a);
    double r = 0.0;
    for (auto o : constrained_) r = std::max(r, m[o] / budget_[o]);
    return r;
  }
  bool feasible(const Assignment& a) { return worst_ratio(a) <= 1.0 + kSlack; }

  std::vector<std::size_t> movable_adders() const {
    std::vector<std::size_t> v;
    for (auto a : net_.adder_indices())
      if (movable_[a]) v.push_back(a);
    return v;
  }

  Assignment min_width(Assignment a) {
    const auto mov = movable_adders();
    for (auto i : mov) a.set(i, 0);
    Assignment out = a;
    for (auto i : mov) {
      Assignment probe = a;
      int best = 0;
      for (int k = 1; k <= net_.frac_bits(); ++k) {
        probe.set(i, k);
        if (feasible(probe)) best = k;
      }
      out.set(i, best);
    }
    return out;
  }

  Assignment greedy(Assignment a) {
    double cur = worst_ratio(a);
    while (cur > 1.0 + kSlack) {
      std::optional<std::size_t> pick;
      double best = 0.0;
      for (auto i : movable_adders()) {
        if (a[i] == 0) continue;
        Assignment probe = a;
        probe.set(i, a[i] - 1);
        const double r = worst_ratio(probe);
        if (!pick || r < best * (1.0 - 1e-12) || (r <= best * (1.0 + 1e-12) && id_rank_[i] < id_rank_[*pick])) {
          best = r;
          pick = i;
        }
      }
      if (!pick) break;  // all movable adders exact
      a.set(*pick, a[*pick] - 1);
      cur = worst_ratio(a);
    }
    return a;
  }

  Assignment tabu(Assignment a) {
    const int n_bits = net_.frac_bits();
    // tabu_until[node][k]: iteration until which raising the node to k is forbidden.
    std::vector<std::vector<int>> until(net_.size(), std::vector<int>(static_cast<std::size_t>(n_bits) + 2, -1));
    for (int it = 0; it < cfg_.max_tabu_iters; ++it) {
      std::optional<std::size_t> pick;
      for (auto i : movable_adders()) {
        if (a[i] >= n_bits || until[i][static_cast<std::size_t>(a[i] + 1)] > it) continue;
        if (!pick || a[i] < a[*pick] || (a[i] == a[*pick] && rank_[i] < rank_[*pick])) pick = i;
      }
      if (!pick) break;
      Assignment probe = a;
      probe.set(*pick, a[*pick] + 1);
      if (feasible(probe)) {
        a = probe;
      } else {
        until[*pick][static_cast<std::size_t>(probe[*pick])] = it + cfg_.tabu_tenure;
      }
    }
    return a;
  }

  StageTrace trace(const std::string& stage, const Assignment& a) {
    const auto m = eval_.output_mse(a);
    double worst = 0.0;
    for (auto o : constrained_) worst = std::max(worst, m[o]);
    return {stage, a.total(), to_db(worst)};
  }

  ModelEvaluator& evaluator() { return eval_; }

 private:
  const Netlist& net_;
  const GainTable& gains_;
  const OptimizeConfig& cfg_;
  ModelEvaluator eval_;
  std::vector<double> budget_;
  std::vector<std::size_t> constrained_;
  std::vector<bool> movable_;
  std::vector<std::size_t> rank_, id_rank_;
};

}  // namespace

Assignment minimum_width(const Netlist& net, const GainTable& gains, const OptimizeConfig& config) {
  Search s(net, gains, config);
  return s.min_width(Assignment(net));
}

Assignment greedy_descent(const Netlist& net, const GainTable& gains, const Assignment& start,
                          const OptimizeConfig& config) {
  Search s(net, gains, config);
  return s.greedy(start);
}

Assignment tabu_refine(const Netlist& net, const GainTable& gains, const Assignment& start,
                       const OptimizeConfig& config) {
  Search s(net, gains, config);
  if (!s.feasible(start)) throw Error(ErrorCode::InvalidArgument, "tabu refinement needs a feasible start");
  return s.tabu(start);
}

OptResult optimize(const Netlist& net, const GainTable& gains, const OptimizeConfig& config) {
  require_valid(net);
  Search s(net, gains, config);
  OptResult res;
  Assignment a(net);
  const auto& outs = gains.outputs();
  std::vector<std::size_t> slots(outs.size());
  std::iota(slots.begin(), slots.end(), 0);
  std::sort(slots.begin(), slots.end(), [&](auto x, auto y) { return net.node(outs[x]).id < net.node(outs[y]).id; });

  // Adders that reach no output cannot affect any budget.
  std::vector<bool> observed(net.size(), false);
  for (std::size_t o = 0; o < outs.size(); ++o)
    for (auto i : gains.cone(o)) observed[i] = true;
  for (auto i : net.adder_indices())
    if (!observed[i]) a.set(i, net.frac_bits());

  std::vector<bool> frozen(net.size(), false);
  std::vector<std::size_t> constrained;
  const bool multi = slots.size() > 1;
  for (auto slot : slots) {
    constrained.push_back(slot);
    std::vector<bool> movable(net.size(), false);
    bool any = false;
    for (auto i : gains.cone(slot))
      if (!frozen[i]) movable[i] = any = true;
    if (!any) continue;
    s.restrict(constrained, movable);
    const std::string tag = multi ? ":" + net.node(outs[slot]).id : "";
    a = s.min_width(a);
    res.trace.push_back(s.trace("min-width" + tag, a));
    a = s.greedy(a);
    if (!s.feasible(a)) {
      // Frozen adders shared with this cone keep it above budget: release them.
      std::vector<bool> cone_all(net.size(), false);
      for (auto i : gains.cone(slot)) cone_all[i] = true;
      s.restrict(constrained, cone_all);
      a = s.greedy(a);
      if (!s.feasible(a)) {
        std::vector<bool> every(net.size(), false);
        for (auto i : net.adder_indices()) every[i] = true;
        s.restrict(constrained, every);
        a = s.greedy(a);
      }
      s.restrict(constrained, movable);
    }
    res.trace.push_back(s.trace("greedy" + tag, a));
    a = s.tabu(a);
    res.trace.push_back(s.trace("tabu" + tag, a));
    if (multi) {
      for (auto i : gains.cone(slot)) {
        if (frozen[i]) continue;
        if (a[i] >= net.frac_bits()) {
          frozen[i] = true;
          continue;
        }
        Assignment probe = a;
        probe.set(i, a[i] + 1);
        if (!s.feasible(probe)) frozen[i] = true;
      }
    }
  }

  // Post-hoc check against every output with a fresh full evaluation.
  res.predicted = analyze(net, a, config.kind, gains, config.model);
  const auto budget = output_budgets(net, config);
  for (std::size_t o = 0; o < res.predicted.outputs.size(); ++o) {
    if (res.predicted.outputs[o].mse > budget[o] * (1.0 + 1e-9)) {
      throw Error(ErrorCode::Internal, "optimized assignment violates the budget of '" +
                                           net.node(res.predicted.outputs[o].output).id + "'");
    }
  }
  res.assignment = a;
  for (auto i : net.adder_indices())
    res.objective += (config.weights.empty() ? 1.0 : config.weights.at(i)) * a[i];
  res.feasible = a.total() > 0 || net.adder_indices().empty();
  return res;
}

OptResult optimize(const Netlist& net, const OptimizeConfig& config) {
  GainTable gains(net);
  return optimize(net, gains, config);
}

}  // namespace apx
