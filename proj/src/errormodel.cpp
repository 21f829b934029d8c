#include "apx/errormodel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "apx/error.hpp"

namespace apx {

namespace {

double bit_prob(double p1, int bit) { return bit ? p1 : 1.0 - p1; }

double at_or_half(const BitProbs& p, int i) {
  return i >= 0 && static_cast<std::size_t>(i) < p.size() ? p[static_cast<std::size_t>(i)] : 0.5;
}

}  // namespace

std::vector<double> carry_profile(AdderKind kind, const BitProbs& a, const BitProbs& b, int k, CarryMode mode) {
  const BitRule& rule = truth_table(kind);  // throws for ETA1
  std::vector<double> out(static_cast<std::size_t>(std::max(k, 0)));
  double prev = 0.0;
  for (int i = 0; i < k; ++i) {
    const double pa = at_or_half(a, i), pb = at_or_half(b, i);
    double alpha = 0.0, beta = 0.0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        const double w = bit_prob(pa, x) * bit_prob(pb, y);
        alpha += w * rule.g(x, y, 0);
        beta += w * (rule.g(x, y, 1) - rule.g(x, y, 0));
      }
    double p;
    if (mode == CarryMode::Positional) {
      p = alpha + beta * prev;
    } else {
      if (std::abs(1.0 - beta) < 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "carry recursion has no unique fixed point (slope 1)");
      }
      p = alpha / (1.0 - beta);
    }
    out[static_cast<std::size_t>(i)] = std::clamp(p, 0.0, 1.0);
    prev = out[static_cast<std::size_t>(i)];
  }
  return out;
}

std::vector<double> sum_profile(AdderKind kind, const BitProbs& a, const BitProbs& b,
                                const std::vector<double>& carry_in) {
  const BitRule& rule = truth_table(kind);
  std::vector<double> out(carry_in.size());
  for (std::size_t i = 0; i < carry_in.size(); ++i) {
    const int ii = static_cast<int>(i);
    const double pa = at_or_half(a, ii), pb = at_or_half(b, ii), pc = carry_in[i];
    double s = 0.0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int c = 0; c < 2; ++c) s += bit_prob(pa, x) * bit_prob(pb, y) * bit_prob(pc, c) * rule.f(x, y, c);
    out[i] = s;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Moment-propagation DP

namespace {

struct Moments {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  bool empty() const { return m0 == 0.0 && m1 == 0.0 && m2 == 0.0; }
};

// Adds `p` times `src` with the running error shifted by `delta`.
inline void accumulate(Moments& dst, double p, const Moments& src, double delta) {
  dst.m0 += p * src.m0;
  dst.m1 += p * (src.m1 + delta * src.m0);
  dst.m2 += p * (src.m2 + 2.0 * delta * src.m1 + delta * delta * src.m0);
}

inline void offset(Moments& m, double delta) {
  m.m2 += 2.0 * delta * m.m1 + delta * delta * m.m0;
  m.m1 += delta * m.m0;
}

// State: (carry or trigger flag, neighbour a bit, neighbour b bit, neighbour sum bit).
constexpr int state(int c, int a, int b, int s) { return (c << 3) | (a << 2) | (b << 1) | s; }
using StateTable = std::array<Moments, 16>;

struct CellOut {
  int sum;
  int carry;
};

// Pairwise statistics of the output bits: marg[i] = P(s_i = 1) and
// joint[i][x][y] = P(s_{i-1} = x, s_i = y).
struct OutputLaw {
  std::vector<double> marg;
  std::vector<std::array<std::array<double, 2>, 2>> joint;

  explicit OutputLaw(int n) : marg(static_cast<std::size_t>(n), 0.0), joint(static_cast<std::size_t>(n)) {}

  BitProcess to_process() const {
    const int n = static_cast<int>(marg.size());
    if (n == 0) return BitProcess{};
    std::vector<std::array<double, 2>> cond(static_cast<std::size_t>(n));
    for (int i = 1; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      for (int x = 0; x < 2; ++x) {
        const double px = bit_prob(marg[ui - 1], x);
        const double both = joint[ui][static_cast<std::size_t>(x)][1];
        cond[ui][static_cast<std::size_t>(x)] = px > 1e-300 ? both / px : marg[ui];
      }
    }
    return BitProcess::markov(marg[0], std::move(cond));
  }
};

// LSB-to-MSB pass over positions [start, end). `cell(i, a, b, c)` gives the
// sum and carry bits; positions below `k_err` add (a + b - s) 2^i to the
// running error, and the carry leaving position k_err - 1 subtracts 2^k_err.
template <typename Cell>
void forward_pass(const BitProcess& A, const BitProcess& B, int start, int end, int k_err, StateTable& cur,
                  Cell cell, OutputLaw& law, double* carry_prob) {
  for (int i = start; i < end; ++i) {
    StateTable next{};
    const double w = std::ldexp(1.0, i);
    for (int s = 0; s < 16; ++s) {
      const Moments& m = cur[static_cast<std::size_t>(s)];
      if (m.empty()) continue;
      const int c = (s >> 3) & 1, pa = (s >> 2) & 1, pb = (s >> 1) & 1, ps = s & 1;
      const double pa1 = i == start ? A.marginal(i) : A.cond(i, pa);
      const double pb1 = i == start ? B.marginal(i) : B.cond(i, pb);
      for (int a = 0; a < 2; ++a) {
        const double wa = bit_prob(pa1, a);
        if (wa == 0.0) continue;
        for (int b = 0; b < 2; ++b) {
          const double p = wa * bit_prob(pb1, b);
          if (p == 0.0) continue;
          const CellOut o = cell(i, a, b, c);
          const double delta = i < k_err ? (a + b - o.sum) * w : 0.0;
          accumulate(next[static_cast<std::size_t>(state(o.carry, a, b, o.sum))], p, m, delta);
          if (o.sum) {
            law.marg[static_cast<std::size_t>(i)] += p * m.m0;
            if (i > 0) law.joint[static_cast<std::size_t>(i)][static_cast<std::size_t>(ps)][1] += p * m.m0;
          }
        }
      }
    }
    if (k_err > 0 && i == k_err - 1) {
      const double wk = -std::ldexp(1.0, k_err);
      double pc = 0.0;
      for (int s = 8; s < 16; ++s) {
        pc += next[static_cast<std::size_t>(s)].m0;
        offset(next[static_cast<std::size_t>(s)], wk);
      }
      if (carry_prob) *carry_prob = pc;
    }
    cur = next;
  }
}

CellOut full_adder(int a, int b, int c) { return {a ^ b ^ c, (a & b) | (a & c) | (b & c)}; }

// Accurate region above an ETA-I lower part: carry 0 at position `start`,
// previous sum bit drawn from its marginal.
void accurate_tail(const BitProcess& A, const BitProcess& B, int start, int end, double prev_sum, OutputLaw& law) {
  if (end <= start) return;
  StateTable cur{};
  cur[state(0, 0, 0, 0)].m0 = 1.0 - prev_sum;
  cur[state(0, 0, 0, 1)].m0 = prev_sum;
  forward_pass(A, B, start, end, 0, cur, [](int, int a, int b, int c) { return full_adder(a, b, c); }, law, nullptr);
  // The joint at `start` pairs s_start with an independent draw of s_{start-1}.
}

}  // namespace

ErrorStats adder_stats(AdderKind kind, int k, const BitProcess& a, const BitProcess& b, const AdderContext& ctx) {
  if (k < 0 || k > 62) throw Error(ErrorCode::InvalidArgument, "k out of range");
  if (a.size() < k || b.size() < k) {
    throw Error(ErrorCode::InvalidArgument, "operand bit processes shorter than k=" + std::to_string(k));
  }
  if (ctx.carry_in != 0 && ctx.carry_in != 1) throw Error(ErrorCode::InvalidArgument, "carry_in must be 0 or 1");
  if (ctx.fill && kind != AdderKind::Median) throw Error(ErrorCode::InvalidArgument, "fill override only applies to the median adder");
  if (ctx.fill && k > 0 && (*ctx.fill >> (k + 1)) != 0) throw Error(ErrorCode::InvalidArgument, "fill override exceeds k+1 bits");

  const int n = std::max(k, ctx.out_bits);
  OutputLaw law(n);
  ErrorStats st;
  StateTable cur{};
  Moments total;

  if (k == 0) {
    cur[state(ctx.carry_in, 0, 0, 0)].m0 = 1.0;
    forward_pass(a, b, 0, n, 0, cur, [](int, int x, int y, int c) { return full_adder(x, y, c); }, law, nullptr);
    st.output = law.to_process();
    return st;
  }

  if (kind == AdderKind::ETA1) {
    StateTable down{};
    down[state(0, 0, 0, 0)].m0 = 1.0;
    for (int i = k - 1; i >= 0; --i) {
      StateTable next{};
      const double w = std::ldexp(1.0, i);
      for (int s = 0; s < 16; ++s) {
        const Moments& m = down[static_cast<std::size_t>(s)];
        if (m.empty()) continue;
        const int t = (s >> 3) & 1, na = (s >> 2) & 1, nb = (s >> 1) & 1, ns = s & 1;
        const double pa1 = i == k - 1 ? a.marginal(i) : a.reverse_cond(i, na);
        const double pb1 = i == k - 1 ? b.marginal(i) : b.reverse_cond(i, nb);
        for (int x = 0; x < 2; ++x) {
          const double wa = bit_prob(pa1, x);
          if (wa == 0.0) continue;
          for (int y = 0; y < 2; ++y) {
            const double p = wa * bit_prob(pb1, y);
            if (p == 0.0) continue;
            const int trig = t | (x & y);
            const int sum = trig ? 1 : (x ^ y);
            accumulate(next[static_cast<std::size_t>(state(trig, x, y, sum))], p, m, (x + y - sum) * w);
            if (sum) law.marg[static_cast<std::size_t>(i)] += p * m.m0;
            if (i < k - 1) {
              law.joint[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(sum)][static_cast<std::size_t>(ns)] +=
                  p * m.m0;
            }
          }
        }
      }
      down = next;
    }
    for (const auto& m : down) {
      total.m0 += m.m0;
      total.m1 += m.m1;
      total.m2 += m.m2;
    }
    offset(total, ctx.carry_in);
    // joint[i][x][1] must hold P(s_{i-1} = x, s_i = 1); the MSB-first pass
    // filled joint[i+1][s_i][s_{i+1}] which is the same layout.
    accurate_tail(a, b, k, n, law.marg[static_cast<std::size_t>(k - 1)], law);
    st.carry_prob = 0.0;
  } else {
    const BitRule& rule = truth_table(kind);
    const auto fill = ctx.fill;
    cur[state(ctx.carry_in, 0, 0, 0)] = Moments{1.0, double(ctx.carry_in), double(ctx.carry_in)};
    auto cell = [&](int i, int x, int y, int c) -> CellOut {
      if (i >= k) return full_adder(x, y, c);
      if (fill) return {static_cast<int>((*fill >> i) & 1), i == k - 1 ? static_cast<int>((*fill >> k) & 1) : 0};
      return {rule.f(x, y, c), rule.g(x, y, c)};
    };
    forward_pass(a, b, 0, n, k, cur, cell, law, &st.carry_prob);
    // After the boundary the moments no longer change; any state table
    // from position k onward holds the final error distribution.
    for (const auto& m : cur) {
      total.m0 += m.m0;
      total.m1 += m.m1;
      total.m2 += m.m2;
    }
  }

  st.mean = total.m1;
  st.mse = std::max(total.m2, 0.0);
  if (kind == AdderKind::Accurate) st.mean = st.mse = 0.0;
  st.out_probs = BitProbs(std::vector<double>(law.marg.begin(), law.marg.begin() + k));
  st.output = law.to_process();
  return st;
}

// ---------------------------------------------------------------------------

BitProbs mult_prob_rule(const Coefficient& c, const BitProbs& in, int k_out) {
  std::vector<double> out(static_cast<std::size_t>(std::max(k_out, 0)), 0.5);
  if (c.grid_num == 0) {
    std::fill(out.begin(), out.end(), 0.0);
    return BitProbs(std::move(out));
  }
  const auto l = c.power_of_two();
  if (!l) return BitProbs(std::move(out));
  for (int i = 0; i < k_out; ++i) {
    const int src = i - *l;
    double p;
    if (src < 0) {
      p = 0.0;  // zeros shifted in at the bottom
    } else {
      p = at_or_half(in, src);
      if (c.negative()) p = 1.0 - p;
    }
    out[static_cast<std::size_t>(i)] = p;
  }
  return BitProbs(std::move(out));
}

BitProcess mult_process_rule(const Coefficient& c, const BitProcess& in, int k_out) {
  if (c.grid_num == 0) return BitProcess::constant(0, k_out);
  const auto l = c.power_of_two();
  if (!l) return BitProcess::uniform(k_out);
  return (c.negative() ? in.flipped() : in).shifted(*l, k_out);
}

std::uint64_t ma_fill_constant(int k3, AdderKind parent1, int k1, AdderKind parent2, int k2) {
  if (k3 <= 0) return 0;
  const std::uint64_t plain = (std::uint64_t{1} << k3) - 1;
  const std::uint64_t refined = (std::uint64_t{1} << (k3 + 1)) - 1;
  const bool median1 = parent1 == AdderKind::Median && k1 > 0;
  const bool median2 = parent2 == AdderKind::Median && k2 > 0;
  if (!median1 || !median2) return plain;
  if (k3 <= std::min(k1, k2)) return refined;
  if ((k1 >= k3 && k3 > k2) || (k2 >= k3 && k3 > k1)) return refined;
  return plain;
}

std::string_view to_string(ProbMode mode) {
  switch (mode) {
    case ProbMode::Uniform: return "uniform";
    case ProbMode::Marginal: return "marginal";
    case ProbMode::Markov: return "markov";
  }
  return "?";
}

ProbMode parse_prob_mode(std::string_view name) {
  if (name == "uniform") return ProbMode::Uniform;
  if (name == "marginal") return ProbMode::Marginal;
  if (name == "markov" || name == "param") return ProbMode::Markov;
  throw Error(ErrorCode::InvalidArgument, "unknown probability mode '" + std::string(name) + "' (uniform|marginal|markov)");
}

}  // namespace apx
