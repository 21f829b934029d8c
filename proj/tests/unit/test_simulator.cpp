#include <cmath>
#include <filesystem>
#include <fstream>

#include "apx/benchmarks.hpp"
#include "apx/error.hpp"
#include "apx/errormodel.hpp"
#include "apx/pgm.hpp"
#include "apx/simulator.hpp"
#include "doctest.h"

using namespace apx;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("apx_test_" + name)).string();
}

bool within_se(const EmpiricalStats& s, double expect, double k = 3.0) {
  return std::abs(s.mse_lsb - expect) <= k * s.se_mse_lsb + 1e-12;
}

}  // namespace

TEST_CASE("k=0 is exact") {
  for (const char* name : {"fig3a", "fir18", "iir4", "dct8"}) {
    const auto n = generate_benchmark(name, 12);
    SimConfig c;
    c.samples = 2000;
    const auto r = simulate(n, Assignment(n, 0), AdderKind::LOA, c);
    for (const auto& o : r.outputs) CHECK(o.mse == 0.0);
  }
}

TEST_CASE("single adders agree with the model") {
  const auto n = parse_netlist(std::string_view("format frac=10\ninput a\ninput b\nadd s a b\noutput y s\n"));
  SimConfig c;
  c.samples = 100000;
  for (auto kind : kAllAdderKinds) {
    for (int k : {2, 4, 7}) {
      const auto r = simulate(n, Assignment(n, k), kind, c);
      const auto u = BitProcess::uniform(10);
      const auto s = adder_stats(kind, k, u, u);
      INFO(to_string(kind) << " k=" << k);
      CHECK(within_se(r.outputs[0], s.mse, 4.0));
      CHECK(within_se(r.adders[0], s.mse, 4.0));
    }
  }
}

TEST_CASE("subtractor agrees with the model") {
  const auto n = parse_netlist(std::string_view("format frac=10\ninput a\ninput b\nsub s a b\noutput y s\n"));
  const auto u = BitProcess::uniform(10);
  AdderContext ctx;
  ctx.carry_in = 1;
  for (auto kind : {AdderKind::LOA, AdderKind::AMA1, AdderKind::ETA1}) {
    const auto r = simulate(n, Assignment(n, 5), kind);
    CHECK(within_se(r.outputs[0], adder_stats(kind, 5, u, u.flipped(), ctx).mse, 4.0));
  }
}

TEST_CASE("adder tree") {
  const auto n = gen_fig3a(8);
  const auto r = simulate(n, Assignment(n, 4), AdderKind::Trunc);
  CHECK(within_se(r.outputs[0], 985.0));
  CHECK(r.outputs[0].mean_lsb == doctest::Approx(30).epsilon(0.01));
}

TEST_CASE("determinism and chunking") {
  const auto n = gen_iir4(12);
  SimConfig c;
  c.samples = 5000;
  c.seed = 5;
  c.chunk = 1000;
  const auto a = simulate(n, Assignment(n, 4), AdderKind::LOA, c);
  const auto b = simulate(n, Assignment(n, 4), AdderKind::LOA, c);
  CHECK(a.outputs[0].mse_lsb == b.outputs[0].mse_lsb);
  c.threads = 3;
  const auto t = simulate(n, Assignment(n, 4), AdderKind::LOA, c);
  CHECK(a.outputs[0].mse_lsb == t.outputs[0].mse_lsb);
  CHECK(a.warmup > 0);
  c.seed = 6;
  CHECK(simulate(n, Assignment(n, 4), AdderKind::LOA, c).outputs[0].mse_lsb != a.outputs[0].mse_lsb);
}

TEST_CASE("file and image inputs") {
  const auto n = parse_netlist(std::string_view("format frac=8\ninput a\ninput b\nadd s a b\noutput y s\n"));
  const auto path = temp_path("values.txt");
  {
    std::ofstream f(path);
    f << "# two pairs\n3\n5\n\n-7\n12\n";
  }
  CHECK(read_value_file(path) == std::vector<std::int64_t>{3, 5, -7, 12});
  SimConfig c;
  c.source = InputSource::File;
  c.path = path;
  c.samples = 2;
  const auto r = simulate(n, Assignment(n, 2), AdderKind::Trunc, c);
  // (3,5): low bits 3+1 -> error 4; (-7,12): 1+0 -> error 1.
  CHECK(r.outputs[0].mse_lsb == doctest::Approx((16.0 + 1.0) / 2));
  std::filesystem::remove(path);

  const auto img = temp_path("img.pgm");
  {
    std::ofstream f(img, std::ios::binary);
    f << "P2\n2 2\n255\n0 255\n128 64\n";
  }
  c.source = InputSource::Image;
  c.path = img;
  c.samples = 2;
  const auto ri = simulate(n, Assignment(n, 0), AdderKind::Trunc, c);
  CHECK(ri.outputs[0].mse == 0.0);
  std::filesystem::remove(img);
  c.path = "/nonexistent/x.pgm";
  CHECK_THROWS_AS(simulate(n, Assignment(n, 0), AdderKind::Trunc, c), Error);
}

TEST_CASE("pgm parsing") {
  const auto a = parse_pgm("P2\n# c\n2 2\n255\n0 255 128 64\n");
  CHECK(a.width == 2);
  CHECK(a.pixels == std::vector<std::uint8_t>{0, 255, 128, 64});
  std::string bin = "P5\n2 2\n255\n";
  bin += std::string{'\x00', '\xff', '\x80', '\x40'};
  CHECK(parse_pgm(bin).pixels == a.pixels);
  CHECK_THROWS_AS(parse_pgm("P5\n2 2\n65535\n"), Error);
  CHECK_THROWS_AS(parse_pgm("P6\n1 1\n255\n"), Error);
  CHECK(pgm_samples(a, 10) == std::vector<std::int64_t>{0, 1020, 512, 256});
  CHECK(pgm_samples(a, 6) == std::vector<std::int64_t>{0, 63, 32, 16});
}

TEST_CASE("node widths") {
  const auto n = gen_fig3a(8);
  const auto w = node_widths(n);
  CHECK(w[n.index_of("x1")] >= 10);
  CHECK(w[n.index_of("adder3")] >= w[n.index_of("adder1")]);
  for (int x : w) CHECK(x <= 62);
}

TEST_CASE("DCT of a constant image") {
  const auto n = gen_dct8(8);
  const auto img = temp_path("flat.pgm");
  {
    std::ofstream f(img);
    f << "P2\n8 8\n255\n";
    for (int i = 0; i < 64; ++i) f << "100\n";
  }
  SimConfig c;
  c.source = InputSource::Image;
  c.path = img;
  c.samples = 1;
  // Accurate at k=0 is the reference; run with an approximate kind at k=0 too.
  const auto r = simulate(n, Assignment(n, 0), AdderKind::ETA1, c);
  for (const auto& o : r.outputs) CHECK(o.mse == 0.0);
  std::filesystem::remove(img);
}
