#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "apx/apx.h"
#include "doctest.h"

namespace {

const char* kTree =
    "format frac=8\ninput x1\ninput x2\ninput x3\ninput x4\nadd adder1 x1 x2\nadd adder2 x3 x4\n"
    "add adder3 adder1 adder2\noutput y adder3\n";

std::string tmp(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST_CASE("netlists and errors") {
  apx_netlist* net = nullptr;
  REQUIRE(apx_netlist_parse(kTree, &net) == APX_OK);
  CHECK(apx_netlist_frac_bits(net) == 8);
  CHECK(apx_netlist_adder_count(net) == 3);
  CHECK(apx_netlist_output_count(net) == 1);
  apx_netlist* bad = nullptr;
  CHECK(apx_netlist_parse("format frac=8\nadd a b c\n", &bad) == APX_ERR_PARSE);
  CHECK(bad == nullptr);
  CHECK(std::string(apx_last_error()).find("line 2") != std::string::npos);
  CHECK(apx_netlist_read("/nonexistent.apx", &bad) == APX_ERR_IO);
  CHECK(apx_netlist_parse(nullptr, &bad) == APX_ERR_INVALID_ARGUMENT);
  CHECK(std::strcmp(apx_status_name(APX_ERR_INFEASIBLE), "infeasible") == 0);
  apx_netlist* gen = nullptr;
  REQUIRE(apx_benchmark_generate("dct8", 10, &gen) == APX_OK);
  CHECK(apx_netlist_adder_count(gen) == 288);
  const auto path = tmp("apx_capi_dct.apx");
  CHECK(apx_netlist_write(gen, path.c_str()) == APX_OK);
  apx_netlist* back = nullptr;
  CHECK(apx_netlist_read(path.c_str(), &back) == APX_OK);
  CHECK(apx_netlist_output_count(back) == 64);
  apx_netlist_free(back);
  apx_netlist_free(gen);
  apx_netlist_free(net);
  apx_netlist_free(nullptr);
  std::filesystem::remove(path);
}

TEST_CASE("assignments") {
  apx_netlist* net = nullptr;
  REQUIRE(apx_netlist_parse(kTree, &net) == APX_OK);
  apx_assignment* a = nullptr;
  REQUIRE(apx_assignment_uniform(net, 4, &a) == APX_OK);
  CHECK(apx_assignment_total(a) == 12);
  CHECK(apx_assignment_set(net, a, "adder3", 2) == APX_OK);
  int k = -1;
  CHECK(apx_assignment_get(net, a, "adder3", &k) == APX_OK);
  CHECK(k == 2);
  CHECK(apx_assignment_set(net, a, "x1", 2) == APX_ERR_INVALID_ARGUMENT);
  CHECK(apx_assignment_set(net, a, "adder1", 9) == APX_ERR_INVALID_ARGUMENT);
  const auto path = tmp("apx_capi_asg.txt");
  CHECK(apx_assignment_write(net, a, path.c_str()) == APX_OK);
  apx_assignment* b = nullptr;
  CHECK(apx_assignment_read(net, path.c_str(), &b) == APX_OK);
  CHECK(apx_assignment_hash(net, a) == apx_assignment_hash(net, b));
  apx_assignment_free(b);
  apx_assignment_free(a);
  apx_netlist_free(net);
  std::filesystem::remove(path);
}

TEST_CASE("analyze, simulate, compare") {
  apx_netlist* net = nullptr;
  REQUIRE(apx_netlist_parse(kTree, &net) == APX_OK);
  apx_assignment* a = nullptr;
  REQUIRE(apx_assignment_uniform(net, 4, &a) == APX_OK);
  apx_model_options m;
  apx_model_options_init(&m);
  m.adder_kind = "trunc";
  apx_report* r = nullptr;
  REQUIRE(apx_analyze(net, a, &m, &r) == APX_OK);
  CHECK(apx_report_output_count(r) == 1);
  CHECK(apx_report_np_db(r, 0) == doctest::Approx(10 * std::log10(985.0 / 65536.0)));
  const char* text = nullptr;
  REQUIRE(apx_report_render(r, "csv", &text) == APX_OK);
  CHECK(std::string(text).find("# assignment_hash:") != std::string::npos);
  CHECK(apx_report_render(r, "xml", &text) == APX_ERR_INVALID_ARGUMENT);
  apx_report_free(r);

  m.adder_kind = "nope";
  CHECK(apx_analyze(net, a, &m, &r) == APX_ERR_INVALID_ARGUMENT);
  m.adder_kind = "trunc";

  apx_sim_options s;
  apx_sim_options_init(&s);
  s.samples = 20000;
  s.seed = 7;
  REQUIRE(apx_compare(net, a, &m, &s, &r) == APX_OK);
  REQUIRE(apx_report_render(r, "csv", &text) == APX_OK);
  const std::string cmp = text;
  CHECK(cmp.find("# seed: 7") != std::string::npos);
  CHECK(cmp.find("np_analytical_uniform") != std::string::npos);
  CHECK(std::abs(apx_report_np_db(r, 0) - 10 * std::log10(985.0 / 65536.0)) < 0.2);
  apx_report_free(r);

  REQUIRE(apx_simulate(net, a, &m, &s, &r) == APX_OK);
  CHECK(std::isfinite(apx_report_np_db(r, 0)));
  apx_report_free(r);
  apx_assignment_free(a);
  apx_netlist_free(net);
}

TEST_CASE("optimize") {
  apx_netlist* net = nullptr;
  REQUIRE(apx_netlist_parse(kTree, &net) == APX_OK);
  apx_optimize_options o;
  apx_optimize_options_init(&o);
  o.model.adder_kind = "loa";
  o.target_db = -30.0;
  apx_assignment* a = nullptr;
  apx_report* r = nullptr;
  REQUIRE(apx_optimize(net, &o, &a, &r) == APX_OK);
  CHECK(apx_report_feasible(r) == 1);
  CHECK(apx_report_np_db(r, 0) <= -30.0);
  CHECK(apx_assignment_total(a) > 0);
  apx_report_free(r);
  apx_assignment_free(a);
  o.target_db = -300.0;
  REQUIRE(apx_optimize(net, &o, &a, &r) == APX_OK);
  CHECK(apx_report_feasible(r) == 0);
  CHECK(apx_assignment_total(a) == 0);
  apx_report_free(r);
  apx_assignment_free(a);
  apx_netlist_free(net);
}

TEST_CASE("uniformity check") {
  const auto path = tmp("apx_capi_samples.txt");
  {
    std::ofstream f(path);
    for (int r = 0; r < 10; ++r)
      for (int v = 0; v < 16; ++v) f << v << '\n';
  }
  apx_report* r = nullptr;
  REQUIRE(apx_check_uniformity(path.c_str(), 4, 0.06, &r) == APX_OK);
  CHECK(apx_report_k_max(r) == 4);
  apx_report_free(r);
  CHECK(apx_check_uniformity(path.c_str(), 3, 0.06, &r) == APX_ERR_INVALID_ARGUMENT);
  std::filesystem::remove(path);
}
