#include "apx/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "apx/error.hpp"
#include "apx/errormodel.hpp"
#include "apx/noise.hpp"
#include "apx/pgm.hpp"

namespace apx {

namespace {

using i128 = __int128;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Op {
  NodeKind kind = NodeKind::Input;
  std::size_t node = 0;
  std::size_t a = 0, b = 0;
  std::int64_t p = 0;  // multiplier numerator
  int q = 0;           // multiplier shift
  int k = 0;
  std::optional<std::uint64_t> fill;
  std::int64_t limit = 0;  // |value| must stay below
  int input_slot = -1;
  int adder_slot = -1;
};

struct Moments {
  std::size_t n = 0;
  i128 s1 = 0, s2 = 0, s4 = 0;

  void add(std::int64_t e) {
    const i128 e2 = static_cast<i128>(e) * e;
    ++n;
    s1 += e;
    s2 += e2;
    s4 += e2 * e2;
  }
  void merge(const Moments& o) {
    n += o.n;
    s1 += o.s1;
    s2 += o.s2;
    s4 += o.s4;
  }
};

struct Partial {
  std::vector<Moments> outputs, adders;
};

class Machine {
 public:
  Machine(const Netlist& net, const Assignment& asg, AdderKind kind, const std::vector<int>& widths, bool refine)
      : kind_(kind), net_(net) {
    const auto fills = median_fills(net, asg, kind, refine);
    const auto inputs = net.input_indices();
    const auto adders = net.adder_indices();
    const auto outs = net.output_indices();
    for (auto i : topological_order(net)) {
      const Node& n = net.node(i);
      if (n.kind == NodeKind::Delay) continue;
      Op op;
      op.kind = n.kind;
      op.node = i;
      const auto src = net.sources(i);
      if (!src.empty()) op.a = src[0];
      if (src.size() > 1) op.b = src[1];
      if (n.kind == NodeKind::MulConst) {
        op.p = n.coefficient->grid_num;
        op.q = n.coefficient->grid_shift;
      }
      if (n.is_adder()) {
        op.k = asg[i];
        op.fill = fills[i];
        op.adder_slot = static_cast<int>(std::find(adders.begin(), adders.end(), i) - adders.begin());
      }
      if (n.kind == NodeKind::Input) {
        op.input_slot = static_cast<int>(std::find(inputs.begin(), inputs.end(), i) - inputs.begin());
      }
      op.limit = std::int64_t{1} << (widths[i] - 1);
      ops_.push_back(op);
    }
    for (std::size_t i = 0; i < net.size(); ++i)
      if (net.node(i).kind == NodeKind::Delay) delays_.emplace_back(i, net.sources(i).front());
    outputs_ = outs;
    n_adders_ = adders.size();
    va_.assign(net.size(), 0);
    vr_.assign(net.size(), 0);
    sa_.assign(net.size(), 0);
    sr_.assign(net.size(), 0);
    local_.assign(n_adders_, 0);
  }

  std::size_t n_adders() const { return n_adders_; }

  void reset() {
    std::fill(sa_.begin(), sa_.end(), 0);
    std::fill(sr_.begin(), sr_.end(), 0);
  }

  // One time step; `sample` is the global index used in overflow messages.
  void step(const std::int64_t* x, std::size_t sample) {
    for (const auto& [d, s] : delays_) {
      va_[d] = sa_[d];
      vr_[d] = sr_[d];
    }
    for (const auto& op : ops_) {
      std::int64_t a = 0, r = 0;
      switch (op.kind) {
        case NodeKind::Input: a = r = x[op.input_slot]; break;
        case NodeKind::Add:
          a = approx_add(kind_, op.k, va_[op.a], va_[op.b], 0, op.fill);
          local_[static_cast<std::size_t>(op.adder_slot)] = va_[op.a] + va_[op.b] - a;
          r = vr_[op.a] + vr_[op.b];
          break;
        case NodeKind::Sub:
          a = approx_sub(kind_, op.k, va_[op.a], va_[op.b], op.fill);
          local_[static_cast<std::size_t>(op.adder_slot)] = va_[op.a] - va_[op.b] - a;
          r = vr_[op.a] - vr_[op.b];
          break;
        case NodeKind::MulConst:
          a = static_cast<std::int64_t>((static_cast<i128>(va_[op.a]) * op.p) >> op.q);
          r = static_cast<std::int64_t>((static_cast<i128>(vr_[op.a]) * op.p) >> op.q);
          break;
        case NodeKind::Output: a = va_[op.a], r = vr_[op.a]; break;
        case NodeKind::Delay: break;
      }
      if (a >= op.limit || a < -op.limit || r >= op.limit || r < -op.limit) {
        throw Error(ErrorCode::Overflow, "overflow at node '" + net_.node(op.node).id + "' in sample " +
                                             std::to_string(sample));
      }
      va_[op.node] = a;
      vr_[op.node] = r;
    }
    for (const auto& [d, s] : delays_) {
      sa_[d] = va_[s];
      sr_[d] = vr_[s];
    }
  }

  void record(Partial& p) const {
    for (std::size_t o = 0; o < outputs_.size(); ++o) p.outputs[o].add(vr_[outputs_[o]] - va_[outputs_[o]]);
    for (std::size_t j = 0; j < n_adders_; ++j) p.adders[j].add(local_[j]);
  }

  Partial empty_partial() const { return {std::vector<Moments>(outputs_.size()), std::vector<Moments>(n_adders_)}; }

 private:
  AdderKind kind_;
  const Netlist& net_;
  std::vector<Op> ops_;
  std::vector<std::pair<std::size_t, std::size_t>> delays_;
  std::vector<std::size_t> outputs_;
  std::size_t n_adders_ = 0;
  std::vector<std::int64_t> va_, vr_, sa_, sr_, local_;
};

EmpiricalStats finish(std::size_t node, const Moments& m, int frac_bits) {
  EmpiricalStats st;
  st.node = node;
  st.count = m.n;
  if (m.n == 0) return st;
  const long double n = static_cast<long double>(m.n);
  const long double mean = static_cast<long double>(m.s1) / n;
  const long double mse = static_cast<long double>(m.s2) / n;
  const long double m4 = static_cast<long double>(m.s4) / n;
  st.mean_lsb = static_cast<double>(mean);
  st.mse_lsb = static_cast<double>(mse);
  st.var_lsb = static_cast<double>(std::max<long double>(0.0L, mse - mean * mean));
  st.se_mse_lsb = static_cast<double>(std::sqrt(std::max<long double>(0.0L, m4 - mse * mse) / n));
  const double lsb = std::ldexp(1.0, -frac_bits);
  st.mean = st.mean_lsb * lsb;
  st.var = st.var_lsb * lsb * lsb;
  st.mse = st.mse_lsb * lsb * lsb;
  st.se_mse = st.se_mse_lsb * lsb * lsb;
  st.np_db = to_db(st.mse);
  return st;
}

std::vector<std::int64_t> external_values(const Netlist& net, const SimConfig& cfg) {
  std::vector<std::int64_t> v;
  if (cfg.source == InputSource::File) {
    v = read_value_file(cfg.path);
  } else {
    v = pgm_samples(read_pgm(cfg.path), net.frac_bits());
  }
  const std::int64_t lim = std::int64_t{1} << net.frac_bits();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < -lim || v[i] >= lim) {
      throw Error(ErrorCode::InvalidArgument, "input value " + std::to_string(v[i]) + " at position " +
                                                  std::to_string(i) + " outside the 1.N range");
    }
  }
  return v;
}

}  // namespace

std::vector<int> node_widths(const Netlist& net) {
  require_valid(net);
  const int n_bits = net.frac_bits();
  std::vector<double> bound(net.size(), 0.0);
  const double full = std::ldexp(1.0, n_bits);
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto kind = net.node(i).kind;
    double amp;
    if (kind == NodeKind::Input) {
      amp = full;
    } else if (net.node(i).is_adder()) {
      amp = 2.0 * full;  // lower-part error never exceeds 2^(k+1) <= 2^(N+1)
    } else if (kind == NodeKind::MulConst) {
      amp = 1.0;  // floor rounding
    } else {
      continue;
    }
    const auto sp = node_spread(net, i);
    for (std::size_t j = 0; j < net.size(); ++j) bound[j] += amp * sp.l1[j];
  }
  std::vector<int> w(net.size());
  for (std::size_t j = 0; j < net.size(); ++j) {
    const int bits = static_cast<int>(std::ceil(std::log2(bound[j] * 1.01 + 2.0))) + 2;
    if (bits > 62) {
      throw Error(ErrorCode::Overflow, "node '" + net.node(j).id + "' needs " + std::to_string(bits) +
                                           " integer bits, beyond 64-bit simulation");
    }
    w[j] = std::max(bits, n_bits + 2);
  }
  return w;
}

std::vector<std::int64_t> read_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<std::int64_t> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    long long v;
    if (!(ss >> v)) {
      std::string junk;
      std::istringstream again(line);
      if (again >> junk) throw ParseError(lineno, "expected an integer, got '" + junk + "'");
      continue;
    }
    std::string extra;
    if (ss >> extra) throw ParseError(lineno, "expected one integer per line");
    out.push_back(v);
  }
  return out;
}

EmpiricalReport simulate(const Netlist& net, const Assignment& asg, AdderKind kind, const SimConfig& cfg) {
  require_valid(net);
  if (asg.size() != net.size()) throw Error(ErrorCode::InvalidArgument, "assignment does not match netlist");
  if (cfg.samples == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
  if (cfg.chunk == 0) throw Error(ErrorCode::InvalidArgument, "chunk size must be positive");
  const auto widths = node_widths(net);
  const int n_bits = net.frac_bits();
  const std::size_t n_in = net.input_indices().size();
  const bool stateful = net.has_delays();

  std::size_t warmup = 0;
  if (stateful) {
    if (cfg.warmup) {
      warmup = *cfg.warmup;
    } else {
      std::size_t longest = 0;
      for (auto i : net.adder_indices()) longest = std::max(longest, node_spread(net, i).length);
      for (auto i : net.input_indices()) longest = std::max(longest, node_spread(net, i).length);
      warmup = 4 * longest;
    }
  }

  EmpiricalReport rep;
  rep.frac_bits = n_bits;
  rep.seed = cfg.seed;
  rep.warmup = warmup;
  Machine proto(net, asg, kind, widths, cfg.refine_median);
  Partial total = proto.empty_partial();

  if (cfg.source == InputSource::Uniform) {
    const std::size_t n_chunks = (cfg.samples + cfg.chunk - 1) / cfg.chunk;
    std::vector<Partial> parts(n_chunks);
    auto run_chunk = [&](std::size_t c) {
      Machine m(net, asg, kind, widths, cfg.refine_median);
      Partial p = m.empty_partial();
      std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(c + 1)));
      const std::size_t begin = c * cfg.chunk;
      const std::size_t count = std::min(cfg.chunk, cfg.samples - begin);
      std::vector<std::int64_t> x(n_in);
      const std::int64_t half = std::int64_t{1} << n_bits;
      for (std::size_t t = 0; t < warmup + count; ++t) {
        for (auto& v : x) v = static_cast<std::int64_t>(rng() >> (63 - n_bits)) - half;
        m.step(x.data(), begin + t);
        if (t >= warmup) m.record(p);
      }
      parts[c] = std::move(p);
    };
    const std::size_t n_threads =
        std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.threads, 1)), n_chunks));
    if (n_threads == 1) {
      for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(n_threads);
      for (std::size_t w = 0; w < n_threads; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t c = w; c < n_chunks; c += n_threads) run_chunk(c);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    for (const auto& p : parts) {
      for (std::size_t o = 0; o < total.outputs.size(); ++o) total.outputs[o].merge(p.outputs[o]);
      for (std::size_t j = 0; j < total.adders.size(); ++j) total.adders[j].merge(p.adders[j]);
    }
  } else {
    const auto values = external_values(net, cfg);
    if (n_in == 0) throw Error(ErrorCode::InvalidArgument, "netlist has no inputs");
    const std::size_t steps = values.size() / n_in;
    if (steps <= warmup) {
      throw Error(ErrorCode::InvalidArgument, "input stream has " + std::to_string(steps) +
                                                  " steps, not more than the warmup of " + std::to_string(warmup));
    }
    const std::size_t count = std::min(cfg.samples, steps - warmup);
    for (std::size_t t = 0; t < warmup + count; ++t) {
      proto.step(values.data() + t * n_in, t);
      if (t >= warmup) proto.record(total);
    }
  }

  const auto outs = net.output_indices();
  const auto adders = net.adder_indices();
  for (std::size_t o = 0; o < outs.size(); ++o) {
    rep.outputs.push_back(finish(outs[o], total.outputs[o], n_bits));
    rep.mean_mse += rep.outputs.back().mse;
  }
  for (std::size_t j = 0; j < adders.size(); ++j) rep.adders.push_back(finish(adders[j], total.adders[j], n_bits));
  if (!rep.outputs.empty()) rep.mean_mse /= static_cast<double>(rep.outputs.size());
  rep.mean_np_db = to_db(rep.mean_mse);
  rep.samples = rep.outputs.empty() ? 0 : rep.outputs.front().count;
  return rep;
}

}  // namespace apx
