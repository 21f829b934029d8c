#include "apx/benchmarks.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "apx/error.hpp"

namespace apx {

namespace {

Node make(std::string id, NodeKind kind, std::vector<std::string> inputs = {},
          std::optional<Coefficient> c = std::nullopt) {
  Node n;
  n.id = std::move(id);
  n.kind = kind;
  n.inputs = std::move(inputs);
  n.coefficient = std::move(c);
  return n;
}

Coefficient grid_coefficient(double v, int frac_bits) {
  const auto den = std::int64_t{1} << frac_bits;
  return make_coefficient(std::llround(v * static_cast<double>(den)), den, frac_bits);
}

void check_frac(int frac_bits) {
  if (frac_bits < 1 || frac_bits > 30) throw Error(ErrorCode::InvalidArgument, "fractional bits must be 1..30");
}

}  // namespace

std::vector<double> fir18_default_taps() {
  constexpr int n = 18;
  constexpr double cutoff = 0.25;
  const double pi = std::numbers::pi;
  std::vector<double> h(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double m = i - (n - 1) / 2.0;
    const double x = cutoff * m;
    const double sinc = x == 0.0 ? 1.0 : std::sin(pi * x) / (pi * x);
    const double window = 0.54 - 0.46 * std::cos(2.0 * pi * i / (n - 1));
    h[static_cast<std::size_t>(i)] = cutoff * sinc * window;
    sum += h[static_cast<std::size_t>(i)];
  }
  for (auto& v : h) v /= sum;
  return h;
}

Netlist gen_fir18(int frac_bits, const std::optional<std::vector<double>>& taps) {
  check_frac(frac_bits);
  const auto h = taps ? *taps : fir18_default_taps();
  if (h.size() != 18) throw Error(ErrorCode::InvalidArgument, "FIR-18 needs 18 coefficients, got " + std::to_string(h.size()));
  Netlist net(frac_bits);
  net.add_node(make("x", NodeKind::Input));
  for (int j = 1; j < 18; ++j) {
    net.add_node(make("x" + std::to_string(j), NodeKind::Delay, {j == 1 ? "x" : "x" + std::to_string(j - 1)}));
  }
  for (int j = 0; j < 18; ++j) {
    net.add_node(make("m" + std::to_string(j), NodeKind::MulConst, {j == 0 ? "x" : "x" + std::to_string(j)},
                      grid_coefficient(h[static_cast<std::size_t>(j)], frac_bits)));
  }
  for (int j = 1; j < 18; ++j) {
    const std::string prev = j == 1 ? "m0" : "a" + std::to_string(j - 1);
    net.add_node(make("a" + std::to_string(j), NodeKind::Add, {prev, "m" + std::to_string(j)}));
  }
  net.add_node(make("y", NodeKind::Output, {"a17"}));
  return net;
}

FilterCoefficients butterworth_lowpass(int order, double cutoff) {
  if (order < 1 || !(cutoff > 0.0 && cutoff < 1.0)) throw Error(ErrorCode::InvalidArgument, "bad Butterworth parameters");
  using cd = std::complex<double>;
  const double pi = std::numbers::pi;
  const double fs2 = 4.0;  // 2 * fs with fs = 2, so cutoff is relative to Nyquist
  const double warped = fs2 * std::tan(pi * cutoff / 2.0);
  std::vector<cd> poles;
  for (int k = 1; k <= order; ++k) {
    const cd p = std::polar(1.0, pi * (2.0 * k + order - 1) / (2.0 * order));
    poles.push_back(p * warped);
  }
  // Bilinear transform of the all-pole prototype; zeros land at z = -1.
  cd denom = 1.0;
  std::vector<cd> zpoles;
  for (const auto& p : poles) {
    zpoles.push_back((fs2 + p) / (fs2 - p));
    denom *= fs2 - p;
  }
  const double gain = std::pow(warped, order) / denom.real();
  std::vector<cd> a{1.0};
  for (const auto& z : zpoles) {
    std::vector<cd> next(a.size() + 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      next[i] += a[i];
      next[i + 1] -= a[i] * z;
    }
    a = next;
  }
  FilterCoefficients fc;
  for (const auto& v : a) fc.a.push_back(v.real());
  // (1 + z^-1)^order
  std::vector<double> b{1.0};
  for (int i = 0; i < order; ++i) {
    std::vector<double> next(b.size() + 1, 0.0);
    for (std::size_t j = 0; j < b.size(); ++j) {
      next[j] += b[j];
      next[j + 1] += b[j];
    }
    b = next;
  }
  for (auto& v : b) v *= gain;
  fc.b = b;
  return fc;
}

Netlist gen_iir4(int frac_bits) {
  check_frac(frac_bits);
  const auto fc = butterworth_lowpass(4, 0.3);
  Netlist net(frac_bits);
  net.add_node(make("x", NodeKind::Input));
  for (int j = 1; j <= 4; ++j) {
    net.add_node(make("w" + std::to_string(j), NodeKind::Delay, {j == 1 ? "w" : "w" + std::to_string(j - 1)}));
    net.add_node(make("fa" + std::to_string(j), NodeKind::MulConst, {"w" + std::to_string(j)},
                      grid_coefficient(-fc.a[static_cast<std::size_t>(j)], frac_bits)));
  }
  net.add_node(make("f1", NodeKind::Add, {"x", "fa1"}));
  net.add_node(make("f2", NodeKind::Add, {"f1", "fa2"}));
  net.add_node(make("f3", NodeKind::Add, {"f2", "fa3"}));
  net.add_node(make("w", NodeKind::Add, {"f3", "fa4"}));
  for (int j = 0; j <= 4; ++j) {
    net.add_node(make("g" + std::to_string(j), NodeKind::MulConst, {j == 0 ? "w" : "w" + std::to_string(j)},
                      grid_coefficient(fc.b[static_cast<std::size_t>(j)], frac_bits)));
  }
  net.add_node(make("s1", NodeKind::Add, {"g0", "g1"}));
  net.add_node(make("s2", NodeKind::Add, {"s1", "g2"}));
  net.add_node(make("s3", NodeKind::Add, {"s2", "g3"}));
  net.add_node(make("s4", NodeKind::Add, {"s3", "g4"}));
  net.add_node(make("y", NodeKind::Output, {"s4"}));
  return net;
}

namespace {

// One 8-point butterfly pass over in[0..7]; appends nodes with ids prefixed
// by `p` and returns the ids of the 8 transform outputs in frequency order.
std::array<std::string, 8> butterfly8(Netlist& net, const std::string& p, const std::array<std::string, 8>& in,
                                      int frac_bits) {
  auto add = [&](const std::string& id, NodeKind k, const std::string& a, const std::string& b) {
    net.add_node(make(p + id, k, {a, b}));
    return p + id;
  };
  auto half = [&](const std::string& id, const std::string& a) {
    net.add_node(make(p + id, NodeKind::MulConst, {a}, make_coefficient(1, 2, frac_bits)));
    return p + id;
  };
  const auto s07 = add("s07", NodeKind::Add, in[0], in[7]);
  const auto s16 = add("s16", NodeKind::Add, in[1], in[6]);
  const auto s25 = add("s25", NodeKind::Add, in[2], in[5]);
  const auto s34 = add("s34", NodeKind::Add, in[3], in[4]);
  const auto d07 = add("d07", NodeKind::Sub, in[0], in[7]);
  const auto d16 = add("d16", NodeKind::Sub, in[1], in[6]);
  const auto d52 = add("d52", NodeKind::Sub, in[5], in[2]);
  const auto d43 = add("d43", NodeKind::Sub, in[4], in[3]);
  const auto e0 = add("e0", NodeKind::Add, s07, s34);
  const auto e1 = add("e1", NodeKind::Add, s16, s25);
  const auto e2 = add("e2", NodeKind::Sub, s07, s34);
  const auto e3 = add("e3", NodeKind::Sub, s16, s25);
  const auto o1 = add("o1", NodeKind::Add, d07, d16);
  const auto o5 = add("o5", NodeKind::Sub, d07, d16);
  const auto h2 = half("h2", e2);
  const auto h3 = half("h3", e3);
  const auto r0 = add("r0", NodeKind::Add, e0, e1);
  const auto r4 = add("r4", NodeKind::Sub, e0, e1);
  const auto r2 = add("r2", NodeKind::Add, e2, h3);
  const auto r6 = add("r6", NodeKind::Sub, h2, e3);
  return {r0, o1, r2, d52, r4, o5, r6, d43};
}

}  // namespace

Netlist gen_dct8(int frac_bits) {
  check_frac(frac_bits);
  Netlist net(frac_bits);
  std::array<std::array<std::string, 8>, 8> x;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) {
      x[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = "x" + std::to_string(r) + std::to_string(c);
      net.add_node(make(x[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)], NodeKind::Input));
    }
  std::array<std::array<std::string, 8>, 8> rows;  // rows[r][u]
  for (int r = 0; r < 8; ++r)
    rows[static_cast<std::size_t>(r)] = butterfly8(net, "r" + std::to_string(r) + "_", x[static_cast<std::size_t>(r)], frac_bits);
  for (int u = 0; u < 8; ++u) {
    std::array<std::string, 8> col;
    for (int r = 0; r < 8; ++r) col[static_cast<std::size_t>(r)] = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(u)];
    const auto out = butterfly8(net, "c" + std::to_string(u) + "_", col, frac_bits);
    for (int v = 0; v < 8; ++v) {
      net.add_node(make("y" + std::to_string(v) + std::to_string(u), NodeKind::Output, {out[static_cast<std::size_t>(v)]}));
    }
  }
  return net;
}

Netlist gen_fig3a(int frac_bits) {
  check_frac(frac_bits);
  Netlist net(frac_bits);
  for (int i = 1; i <= 4; ++i) net.add_node(make("x" + std::to_string(i), NodeKind::Input));
  net.add_node(make("adder1", NodeKind::Add, {"x1", "x2"}));
  net.add_node(make("adder2", NodeKind::Add, {"x3", "x4"}));
  net.add_node(make("adder3", NodeKind::Add, {"adder1", "adder2"}));
  net.add_node(make("y", NodeKind::Output, {"adder3"}));
  return net;
}

Netlist gen_fig3b(int frac_bits, const std::string& coefficient) {
  check_frac(frac_bits);
  Netlist net(frac_bits);
  for (int i = 1; i <= 4; ++i) net.add_node(make("x" + std::to_string(i), NodeKind::Input));
  net.add_node(make("adder1", NodeKind::Add, {"x1", "x2"}));
  net.add_node(make("adder2", NodeKind::Add, {"x3", "x4"}));
  net.add_node(make("mult", NodeKind::MulConst, {"adder2"}, parse_coefficient(coefficient, frac_bits)));
  net.add_node(make("adder3", NodeKind::Add, {"adder1", "mult"}));
  net.add_node(make("y", NodeKind::Output, {"adder3"}));
  return net;
}

Netlist generate_benchmark(const std::string& name, int frac_bits) {
  if (name == "fir18") return gen_fir18(frac_bits);
  if (name == "iir4") return gen_iir4(frac_bits);
  if (name == "dct8") return gen_dct8(frac_bits);
  if (name == "fig3a") return gen_fig3a(frac_bits);
  if (name == "fig3b") return gen_fig3b(frac_bits);
  throw Error(ErrorCode::InvalidArgument, "unknown benchmark '" + name + "' (fir18|iir4|dct8|fig3a|fig3b)");
}

}  // namespace apx
