#include "apx/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "apx/error.hpp"

namespace apx {

namespace {

struct IdealNet {
  std::vector<std::size_t> order;  // non-delay nodes in evaluation order
  std::vector<std::vector<std::size_t>> src;
  std::vector<NodeKind> kind;
  std::vector<double> coef;
  std::vector<std::size_t> delays;

  explicit IdealNet(const Netlist& net) : src(net.size()), kind(net.size()), coef(net.size(), 0.0) {
    for (std::size_t i = 0; i < net.size(); ++i) {
      src[i] = net.sources(i);
      kind[i] = net.node(i).kind;
      if (kind[i] == NodeKind::MulConst) coef[i] = net.node(i).coefficient->value();
      if (kind[i] == NodeKind::Delay) delays.push_back(i);
    }
    for (auto i : topological_order(net))
      if (kind[i] != NodeKind::Delay) order.push_back(i);
  }
};

}  // namespace

std::vector<TransferGain> impulse_responses(const Netlist& net, std::size_t adder, double tol) {
  require_valid(net);
  if (!net.node(adder).is_adder()) throw Error(ErrorCode::InvalidArgument, "'" + net.node(adder).id + "' is not an adder");
  const IdealNet g(net);
  const auto outs = net.output_indices();
  std::vector<TransferGain> res(outs.size());
  std::vector<double> val(net.size(), 0.0), state(net.size(), 0.0);
  std::vector<double> recent(64, 0.0);
  double total = 0.0, window = 0.0;

  for (std::size_t t = 0;; ++t) {
    if (t >= kMaxImpulseLength) {
      throw Error(ErrorCode::Unstable, "impulse response from '" + net.node(adder).id + "' does not decay within " +
                                           std::to_string(kMaxImpulseLength) + " samples");
    }
    for (auto d : g.delays) val[d] = state[d];
    for (auto i : g.order) {
      const auto& s = g.src[i];
      double v = 0.0;
      switch (g.kind[i]) {
        case NodeKind::Input: v = 0.0; break;
        case NodeKind::Add: v = val[s[0]] + val[s[1]]; break;
        case NodeKind::Sub: v = val[s[0]] - val[s[1]]; break;
        case NodeKind::MulConst: v = g.coef[i] * val[s[0]]; break;
        case NodeKind::Output: v = val[s[0]]; break;
        case NodeKind::Delay: break;
      }
      if (i == adder && t == 0) v += 1.0;
      val[i] = v;
    }
    double e = 0.0;
    for (std::size_t o = 0; o < outs.size(); ++o) {
      const double y = val[outs[o]];
      res[o].h.push_back(y);
      e += y * y;
    }
    total += e;
    window += e - recent[t % 64];
    recent[t % 64] = e;
    bool state_zero = true;
    for (auto d : g.delays) {
      state[d] = val[g.src[d][0]];
      if (state[d] != 0.0) state_zero = false;
    }
    if (state_zero) break;
    if (!std::isfinite(total)) {
      throw Error(ErrorCode::Unstable, "impulse response from '" + net.node(adder).id + "' diverges");
    }
    if (t >= 64 && window <= tol * total) break;
  }
  for (auto& tg : res) {
    while (tg.h.size() > 1 && tg.h.back() == 0.0) tg.h.pop_back();
    for (double v : tg.h) {
      tg.dc_gain += v;
      tg.energy += v * v;
    }
  }
  return res;
}

NodeSpread node_spread(const Netlist& net, std::size_t inject, double tol) {
  const IdealNet g(net);
  NodeSpread res;
  res.l1.assign(net.size(), 0.0);
  std::vector<double> val(net.size(), 0.0), state(net.size(), 0.0);
  std::vector<double> recent(64, 0.0);
  double total = 0.0, window = 0.0;
  for (std::size_t t = 0;; ++t) {
    if (t >= kMaxImpulseLength) {
      throw Error(ErrorCode::Unstable, "response to '" + net.node(inject).id + "' does not decay within " +
                                           std::to_string(kMaxImpulseLength) + " samples");
    }
    for (auto d : g.delays) val[d] = state[d];
    for (auto i : g.order) {
      const auto& s = g.src[i];
      double v = 0.0;
      switch (g.kind[i]) {
        case NodeKind::Input: v = 0.0; break;
        case NodeKind::Add: v = val[s[0]] + val[s[1]]; break;
        case NodeKind::Sub: v = val[s[0]] - val[s[1]]; break;
        case NodeKind::MulConst: v = g.coef[i] * val[s[0]]; break;
        case NodeKind::Output: v = val[s[0]]; break;
        case NodeKind::Delay: break;
      }
      if (i == inject && t == 0) v += 1.0;
      val[i] = v;
    }
    double e = 0.0;
    for (std::size_t i = 0; i < net.size(); ++i) {
      res.l1[i] += std::abs(val[i]);
      e += val[i] * val[i];
    }
    total += e;
    window += e - recent[t % 64];
    recent[t % 64] = e;
    res.length = t + 1;
    bool state_zero = true;
    for (auto d : g.delays) {
      state[d] = val[g.src[d][0]];
      if (state[d] != 0.0) state_zero = false;
    }
    if (state_zero) break;
    if (!std::isfinite(total)) throw Error(ErrorCode::Unstable, "response to '" + net.node(inject).id + "' diverges");
    if (t >= 64 && window <= tol * total) break;
  }
  return res;
}

TransferGain impulse_response(const Netlist& net, std::string_view adder_id, std::string_view output_id, double tol) {
  const auto outs = net.output_indices();
  const auto o = net.index_of(output_id);
  const auto slot = std::find(outs.begin(), outs.end(), o);
  if (slot == outs.end()) throw Error(ErrorCode::InvalidArgument, "'" + std::string(output_id) + "' is not an output");
  return impulse_responses(net, net.index_of(adder_id), tol)[static_cast<std::size_t>(slot - outs.begin())];
}

GainTable::GainTable(const Netlist& net, double tol) : outputs_(net.output_indices()), gains_(net.size()) {
  require_valid(net);
  std::vector<bool> in_any(net.size(), false);
  for (auto o : outputs_) {
    cones_.push_back(fanin_cone_indices(net, o));
    for (auto a : cones_.back()) in_any[a] = true;
  }
  for (auto a : net.adder_indices()) {
    if (!in_any[a]) continue;
    gains_[a] = impulse_responses(net, a, tol);
    for (const auto& tg : gains_[a]) max_len_ = std::max(max_len_, tg.h.size());
  }
}

const TransferGain& GainTable::gain(std::size_t adder, std::size_t o) const {
  if (adder >= gains_.size() || gains_[adder].empty()) throw Error(ErrorCode::InvalidArgument, "no gain for this adder");
  return gains_[adder].at(o);
}

double to_db(double mse) {
  return mse > 0.0 ? 10.0 * std::log10(mse) : -std::numeric_limits<double>::infinity();
}

const OutputNoise& NoiseReport::worst() const {
  if (outputs.empty()) throw Error(ErrorCode::InvalidArgument, "report has no outputs");
  return *std::max_element(outputs.begin(), outputs.end(),
                           [](const OutputNoise& a, const OutputNoise& b) { return a.mse < b.mse; });
}

NoiseReport aggregate_output_mse(const Netlist& net, const Assignment& assignment,
                                 const std::vector<std::optional<ErrorStats>>& stats, const GainTable& gains) {
  NoiseReport rep;
  rep.frac_bits = net.frac_bits();
  const double lsb = std::ldexp(1.0, -net.frac_bits());
  const auto& outs = gains.outputs();
  for (std::size_t o = 0; o < outs.size(); ++o) {
    OutputNoise on;
    on.output = outs[o];
    for (auto a : gains.cone(o)) {
      if (a >= stats.size() || !stats[a]) throw Error(ErrorCode::InvalidArgument, "missing statistics for '" + net.node(a).id + "'");
      const auto& tg = gains.gain(a, o);
      AdderContribution c{a, outs[o], assignment[a], stats[a]->mean, stats[a]->var(), tg.dc_gain, tg.energy};
      on.mean_lsb += c.mean_lsb * c.dc_gain;
      on.var_lsb += c.var_lsb * c.energy;
      rep.adders.push_back(c);
    }
    on.mse_lsb = on.mean_lsb * on.mean_lsb + on.var_lsb;
    on.mean = on.mean_lsb * lsb;
    on.var = on.var_lsb * lsb * lsb;
    on.mse = on.mean * on.mean + on.var;
    on.np_db = to_db(on.mse);
    rep.mean_mse += on.mse;
    rep.outputs.push_back(on);
  }
  if (!rep.outputs.empty()) rep.mean_mse /= static_cast<double>(rep.outputs.size());
  rep.mean_np_db = to_db(rep.mean_mse);
  return rep;
}

NoiseReport analyze(const Netlist& net, const Assignment& assignment, AdderKind kind, const GainTable& gains,
                    const ModelOptions& options) {
  const auto prop = propagate_probs(net, assignment, kind, options);
  return aggregate_output_mse(net, assignment, prop.stats, gains);
}

}  // namespace apx
