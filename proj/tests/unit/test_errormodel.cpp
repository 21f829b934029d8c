#include <random>

#include "apx/error.hpp"
#include "apx/errormodel.hpp"
#include "apx/netlist.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace apx;

namespace {

BitProcess random_process(std::mt19937_64& rng, int n, bool markov) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  if (!markov) {
    std::vector<double> p(static_cast<std::size_t>(n));
    for (auto& x : p) x = u(rng);
    return BitProcess::independent(BitProbs(p));
  }
  std::vector<std::array<double, 2>> cond(static_cast<std::size_t>(n));
  for (auto& c : cond) c = {u(rng), u(rng)};
  return BitProcess::markov(u(rng), cond);
}

void check_against_oracle(AdderKind kind, int k, const BitProcess& a, const BitProcess& b, int cin) {
  AdderContext ctx;
  ctx.carry_in = cin;
  ctx.out_bits = k;
  const auto s = adder_stats(kind, k, a, b, ctx);
  const auto o = oracle::enumerate(kind, k, a, b, cin);
  INFO("kind=" << to_string(kind) << " k=" << k << " cin=" << cin);
  CHECK(oracle::close(s.mean, o.mean, 1e-9, 1e-9));
  CHECK(oracle::close(s.mse, o.mse, 1e-9, 1e-9));
  CHECK(oracle::close(s.carry_prob, o.carry, 1e-9, 1e-12));
  REQUIRE(s.out_probs.size() == static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    CHECK(oracle::close(s.out_probs[static_cast<std::size_t>(i)], o.sum_probs[static_cast<std::size_t>(i)], 1e-9, 1e-12));
    CHECK(oracle::close(s.output.marginal(i), o.sum_probs[static_cast<std::size_t>(i)], 1e-9, 1e-12));
  }
}

}  // namespace

TEST_CASE("uniform-input anchors") {
  const auto u = BitProcess::uniform(4);
  const auto t = adder_stats(AdderKind::Trunc, 4, u, u);
  CHECK(t.mean == doctest::Approx(15));
  CHECK(t.mse == doctest::Approx(267.5));
  CHECK(t.carry_prob == 0.0);
  for (double p : t.out_probs.p) CHECK(p == 0.0);
  const auto l = adder_stats(AdderKind::LOA, 4, u, u);
  CHECK(l.mean == doctest::Approx(-0.25));
  CHECK(l.mse == doctest::Approx(16.0));
  const auto a5 = adder_stats(AdderKind::AMA5, 4, u, u);
  CHECK(a5.mean == doctest::Approx(-0.5));
  CHECK(a5.mse == doctest::Approx(21.5));
  const auto m = adder_stats(AdderKind::Median, 4, u, u);
  CHECK(m.mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.mse == doctest::Approx(42.5));
  const auto z = adder_stats(AdderKind::LOA, 0, u, u);
  CHECK(z.mean == 0.0);
  CHECK(z.mse == 0.0);
  const auto acc = adder_stats(AdderKind::Accurate, 4, u, u);
  CHECK(acc.mse == 0.0);
}

TEST_CASE("moment DP equals exhaustive enumeration") {
  std::mt19937_64 rng(7);
  for (auto kind : kAllAdderKinds) {
    for (int k = 1; k <= 7; ++k) {
      for (int trial = 0; trial < 3; ++trial) {
        const bool markov = trial != 0;
        const auto a = random_process(rng, k, markov);
        const auto b = random_process(rng, k, markov);
        check_against_oracle(kind, k, a, b, trial == 2 ? 1 : 0);
      }
    }
  }
}

TEST_CASE("mean identity") {
  std::mt19937_64 rng(11);
  for (auto kind : kAllAdderKinds) {
    const int k = 6;
    const auto a = random_process(rng, k, true);
    const auto b = random_process(rng, k, false);
    const auto s = adder_stats(kind, k, a, b);
    double m = 0;
    for (int i = 0; i < k; ++i) m += (a.marginal(i) + b.marginal(i) - s.out_probs[static_cast<std::size_t>(i)]) * std::ldexp(1.0, i);
    m -= s.carry_prob * std::ldexp(1.0, k);
    CHECK(s.mean == doctest::Approx(m).epsilon(1e-12));
    CHECK(s.var() >= 0.0);
  }
}

TEST_CASE("median fill override matches enumeration") {
  const auto u = BitProcess::uniform(5);
  for (std::uint64_t fill : {31ULL, 63ULL, 5ULL}) {
    AdderContext ctx;
    ctx.fill = fill;
    const auto s = adder_stats(AdderKind::Median, 5, u, u, ctx);
    const auto o = oracle::enumerate(AdderKind::Median, 5, u, u, 0, [&](std::uint64_t, std::uint64_t) {
      return oracle::Lower{fill & 31, static_cast<int>((fill >> 5) & 1)};
    });
    CHECK(s.mean == doctest::Approx(o.mean));
    CHECK(s.mse == doctest::Approx(o.mse));
  }
  AdderContext bad;
  bad.fill = 1;
  CHECK_THROWS_AS(adder_stats(AdderKind::LOA, 4, u, u, bad), Error);
}

TEST_CASE("output law above the approximate part") {
  const auto u = BitProcess::uniform(8);
  for (auto kind : kAllAdderKinds) {
    AdderContext ctx;
    ctx.out_bits = 8;
    const auto s = adder_stats(kind, 4, u, u, ctx);
    REQUIRE(s.output.size() >= 8);
    for (int i = 4; i < 8; ++i) {
      INFO(to_string(kind) << " bit " << i);
      CHECK(s.output.marginal(i) == doctest::Approx(0.5));
    }
  }
  // Exact adder on constants: output is the exact sum.
  AdderContext ctx;
  ctx.out_bits = 6;
  const auto s = adder_stats(AdderKind::Accurate, 3, BitProcess::constant(5, 6), BitProcess::constant(6, 6), ctx);
  for (int i = 0; i < 6; ++i) CHECK(s.output.marginal(i) == doctest::Approx(static_cast<double>((11 >> i) & 1)));
}

TEST_CASE("AMA2 output keeps inter-bit correlation") {
  const auto u = BitProcess::uniform(6);
  AdderContext ctx;
  ctx.out_bits = 6;
  const auto s = adder_stats(AdderKind::AMA2, 6, u, u, ctx);
  // P(s_0 = 1, s_1 = 1) by enumeration.
  double joint = 0;
  for (std::uint64_t a = 0; a < 64; ++a)
    for (std::uint64_t b = 0; b < 64; ++b) {
      const auto l = oracle::lower_part(AdderKind::AMA2, 6, a, b, 0);
      if ((l.sum & 3) == 3) joint += 1.0 / 4096;
    }
  CHECK(s.output.marginal(0) * s.output.cond(1, 1) == doctest::Approx(joint));
  CHECK(s.output.mode() == BitProcess::Mode::Markov);
}

TEST_CASE("carry profiles") {
  const auto u = BitProbs::uniform(5);
  const auto pos = carry_profile(AdderKind::AMA1, u, u, 5, CarryMode::Positional);
  const std::vector<double> expect{0.5, 0.625, 0.65625, 0.6640625, 0.666015625};
  REQUIRE(pos.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(pos[i] == doctest::Approx(expect[i]));
  for (std::size_t i = 3; i < 5; ++i) CHECK(std::abs(pos[i] - 2.0 / 3.0) <= 0.01);
  const auto st = carry_profile(AdderKind::AMA1, u, u, 5, CarryMode::Stationary);
  for (double p : st) CHECK(p == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  for (double p : carry_profile(AdderKind::Accurate, u, u, 5, CarryMode::Stationary)) CHECK(p == doctest::Approx(0.5));
  for (double p : carry_profile(AdderKind::Trunc, u, u, 5, CarryMode::Positional)) CHECK(p == 0.0);
  CHECK_THROWS_AS(carry_profile(AdderKind::ETA1, u, u, 5, CarryMode::Positional), Error);
  // Stationary sum probability of AMA1.
  std::vector<double> cin(5, 2.0 / 3.0);
  for (double p : sum_profile(AdderKind::AMA1, u, u, cin)) CHECK(p == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("multiplier probability rule") {
  const BitProbs in({0.1, 0.2, 0.3, 0.4, 0.6, 0.7});
  const auto two = mult_prob_rule(make_coefficient(2, 1, 8), BitProbs({0.1, 0.2, 0.3}), 3);
  CHECK(two.p == std::vector<double>{0.0, 0.1, 0.2});
  const auto q = mult_prob_rule(make_coefficient(-1, 4, 8), in, 4);
  REQUIRE(q.size() == 4);
  CHECK(q[0] == doctest::Approx(0.7));
  CHECK(q[1] == doctest::Approx(0.6));
  CHECK(q[2] == doctest::Approx(0.4));
  CHECK(q[3] == doctest::Approx(0.3));
  for (double p : mult_prob_rule(make_coefficient(3, 10, 8), in, 6).p) CHECK(p == 0.5);
  for (double p : mult_prob_rule(make_coefficient(0, 1, 8), in, 6).p) CHECK(p == 0.0);
  CHECK(mult_prob_rule(make_coefficient(1, 1, 8), in, 6).p == in.p);
  const auto neg = mult_prob_rule(make_coefficient(-1, 1, 8), in, 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(neg[i] == doctest::Approx(1 - in[i]));
  const auto proc = mult_process_rule(make_coefficient(1, 2, 8), BitProcess::independent(in), 5);
  for (int i = 0; i < 5; ++i) CHECK(proc.marginal(i) == doctest::Approx(in[static_cast<std::size_t>(i + 1)]));
}

TEST_CASE("median fill constants") {
  using K = AdderKind;
  CHECK(ma_fill_constant(4, K::Median, 5, K::Median, 6) == 31);
  CHECK(ma_fill_constant(5, K::Median, 6, K::Median, 3) == 63);
  CHECK(ma_fill_constant(5, K::Median, 3, K::Median, 6) == 63);
  CHECK(ma_fill_constant(7, K::Median, 6, K::Median, 3) == 127);
  CHECK(ma_fill_constant(4, K::Trunc, 5, K::Median, 6) == 15);
}

TEST_CASE("probability modes") {
  CHECK(parse_prob_mode("uniform") == ProbMode::Uniform);
  CHECK(parse_prob_mode("param") == ProbMode::Markov);
  CHECK(parse_prob_mode(to_string(ProbMode::Marginal)) == ProbMode::Marginal);
  CHECK_THROWS_AS(parse_prob_mode("x"), Error);
}

TEST_CASE("propagation through the adder tree") {
  const auto n = parse_netlist(std::string_view(
      "format frac=8\ninput x1\ninput x2\ninput x3\ninput x4\nadd adder1 x1 x2\nadd adder2 x3 x4\n"
      "add adder3 adder1 adder2\noutput y adder3\n"));
  const Assignment a(n, 4);
  const auto p = propagate_probs(n, a, AdderKind::Trunc);
  const auto a1 = n.index_of("adder1"), a3 = n.index_of("adder3");
  for (int i = 0; i < 4; ++i) CHECK(p.process[a1].marginal(i) == 0.0);
  CHECK(p.stats[a1]->mean == doctest::Approx(15));
  CHECK(p.stats[a3]->mean == 0.0);
  CHECK(p.stats[a3]->mse == 0.0);
  const auto m = propagate_probs(n, a, AdderKind::Median, {ProbMode::Markov, false});
  for (int i = 0; i < 4; ++i) CHECK(m.process[a1].marginal(i) == 1.0);
  // Refinement: both parents Median with equal k gives the 2^(k+1)-1 fill.
  const auto r = propagate_probs(n, a, AdderKind::Median);
  REQUIRE(r.fills[a3].has_value());
  CHECK(*r.fills[a3] == 31);
  CHECK(r.stats[a3]->mean == doctest::Approx(-1.0));
  CHECK(r.stats[a3]->mse == doctest::Approx(1.0));
  // Uniform mode ignores parents.
  const auto u = propagate_probs(n, a, AdderKind::Trunc, {ProbMode::Uniform, true});
  CHECK(u.stats[a3]->mean == doctest::Approx(15));
}

TEST_CASE("propagation reaches a fixed point on feedback") {
  const auto n = parse_netlist(std::string_view("format frac=8\ninput x\ndelay d s\nmul m d 1/2\nadd s x m\noutput y s\n"));
  const auto p = propagate_probs(n, Assignment(n, 3), AdderKind::LOA);
  CHECK(p.iterations >= 1);
  CHECK(p.iterations < 200);
  CHECK(p.stats[n.index_of("s")].has_value());
}
