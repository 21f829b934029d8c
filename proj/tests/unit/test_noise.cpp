#include <cmath>

#include "apx/benchmarks.hpp"
#include "apx/error.hpp"
#include "apx/noise.hpp"
#include "doctest.h"

using namespace apx;

namespace {

Netlist net(const char* text) { return parse_netlist(std::string_view(text)); }

}  // namespace

TEST_CASE("impulse responses") {
  const auto tree = gen_fig3a(8);
  const auto g = impulse_response(tree, "adder1", "y");
  CHECK(g.h == std::vector<double>{1.0});
  CHECK(g.dc_gain == 1.0);
  CHECK(g.energy == 1.0);
  const auto half = net("format frac=8\ninput a\ninput b\nadd s a b\nmul m s 1/2\noutput y m\n");
  const auto gh = impulse_response(half, "s", "y");
  CHECK(gh.dc_gain == 0.5);
  CHECK(gh.energy == 0.25);
  const auto loop = net("format frac=8\ninput x\ndelay d s\nmul m d 1/2\nadd s x m\noutput y s\n");
  const auto gl = impulse_response(loop, "s", "y");
  CHECK(gl.h[0] == 1.0);
  CHECK(gl.h[1] == 0.5);
  CHECK(gl.dc_gain == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(gl.energy == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
  const auto bad = net("format frac=8\ninput x\ndelay d s\nmul m d 2\nadd s x m\noutput y s\n");
  CHECK_THROWS_AS(impulse_response(bad, "s", "y"), Error);
}

TEST_CASE("FIR gain equals the sum of path products") {
  const auto n = net(
      "format frac=8\ninput x\nadd a x x\nmul m1 a 1/4\ndelay d a\nmul m2 d -3/4\nadd b m1 m2\nsub c b a\noutput y c\n");
  // Paths from a to y: via m1 (1/4), via d,m2 (-3/4), direct through the sub (-1).
  const auto g = impulse_response(n, "a", "y");
  CHECK(g.dc_gain == doctest::Approx(0.25 - 0.75 - 1.0));
  CHECK(g.h.size() == 2);
  CHECK(g.h[0] == doctest::Approx(-0.75));
  CHECK(g.h[1] == doctest::Approx(-0.75));
}

TEST_CASE("adder tree aggregation") {
  const auto tree = gen_fig3a(8);
  const GainTable gains(tree);
  const auto r = analyze(tree, Assignment(tree, 4), AdderKind::Trunc, gains);
  REQUIRE(r.outputs.size() == 1);
  CHECK(r.outputs[0].mean_lsb == doctest::Approx(30));
  CHECK(r.outputs[0].var_lsb == doctest::Approx(85));
  CHECK(r.outputs[0].mse_lsb == doctest::Approx(985));
  CHECK(r.outputs[0].mse == doctest::Approx(985.0 / 65536.0));
  CHECK(r.outputs[0].np_db == doctest::Approx(10 * std::log10(985.0 / 65536.0)));
  CHECK(r.adders.size() == 3);
  const auto z = analyze(tree, Assignment(tree, 0), AdderKind::LOA, gains);
  CHECK(z.outputs[0].mse == 0.0);
  CHECK(std::isinf(z.outputs[0].np_db));
}

TEST_CASE("aggregation is additive and cancels means") {
  const auto tree = gen_fig3a(8);
  const GainTable gains(tree);
  std::vector<std::optional<ErrorStats>> stats(tree.size());
  ErrorStats s1, s2;
  s1.mean = 3;
  s1.mse = 10;
  s2.mean = -3;
  s2.mse = 13;
  stats[tree.index_of("adder1")] = s1;
  stats[tree.index_of("adder2")] = s2;
  stats[tree.index_of("adder3")] = ErrorStats{};
  const Assignment a(tree, 1);
  const auto r = aggregate_output_mse(tree, a, stats, gains);
  CHECK(r.outputs[0].mean_lsb == 0.0);
  CHECK(r.outputs[0].mse_lsb == doctest::Approx(1 + 4));
  auto only1 = stats;
  only1[tree.index_of("adder2")] = ErrorStats{};
  auto only2 = stats;
  only2[tree.index_of("adder1")] = ErrorStats{};
  const auto r1 = aggregate_output_mse(tree, a, only1, gains);
  const auto r2 = aggregate_output_mse(tree, a, only2, gains);
  CHECK(r1.outputs[0].mean_lsb + r2.outputs[0].mean_lsb == doctest::Approx(r.outputs[0].mean_lsb));
  CHECK(r1.outputs[0].var_lsb + r2.outputs[0].var_lsb == doctest::Approx(r.outputs[0].var_lsb));
}

TEST_CASE("benchmarks at k=0 are noiseless") {
  for (const char* name : {"fir18", "iir4", "dct8"}) {
    const auto n = generate_benchmark(name, 12);
    const GainTable gains(n);
    const auto r = analyze(n, Assignment(n, 0), AdderKind::LOA, gains);
    for (const auto& o : r.outputs) CHECK(o.mse == 0.0);
  }
}

TEST_CASE("multi-output summary") {
  const auto n = net("format frac=4\ninput a\ninput b\nadd s1 a b\nadd s2 a b\noutput A s1\noutput B s2\n");
  const GainTable gains(n);
  CHECK(gains.cone(0) == std::vector<std::size_t>{n.index_of("s1")});
  Assignment a(n, 0);
  a.set(n, "s1", 2);
  const auto r = analyze(n, a, AdderKind::Trunc, gains);
  REQUIRE(r.outputs.size() == 2);
  CHECK(r.outputs[1].mse == 0.0);
  CHECK(r.mean_mse == doctest::Approx(r.outputs[0].mse / 2));
  CHECK(&r.worst() == &r.outputs[0]);
  CHECK(r.mean_np_db == doctest::Approx(to_db(r.mean_mse)));
}
