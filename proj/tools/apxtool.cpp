// Command-line front end; talks to the library only through the C API.
#include <apx/apx.h>

#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"

namespace {

struct Failure {
  apx_status status;
};

void check(apx_status s) {
  if (s != APX_OK) throw Failure{s};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using NetPtr = std::unique_ptr<apx_netlist, Deleter<apx_netlist, apx_netlist_free>>;
using AsgPtr = std::unique_ptr<apx_assignment, Deleter<apx_assignment, apx_assignment_free>>;
using RepPtr = std::unique_ptr<apx_report, Deleter<apx_report, apx_report_free>>;

struct ModelFlags {
  std::string adder = "loa";
  std::string prob_mode = "markov";
  bool no_refine = false;

  apx_model_options options() const {
    apx_model_options o;
    apx_model_options_init(&o);
    o.adder_kind = adder.c_str();
    o.prob_mode = prob_mode.c_str();
    o.refine_median = no_refine ? 0 : 1;
    return o;
  }
};

struct SimFlags {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::string input;
  std::string image;
  long long warmup = -1;
  int threads = 1;

  apx_sim_options options() const {
    apx_sim_options o;
    apx_sim_options_init(&o);
    o.samples = samples;
    o.seed = seed;
    o.warmup = warmup;
    o.threads = threads;
    if (!input.empty()) {
      o.source = APX_INPUT_FILE;
      o.input_path = input.c_str();
    } else if (!image.empty()) {
      o.source = APX_INPUT_IMAGE;
      o.input_path = image.c_str();
    }
    return o;
  }
};

NetPtr load_netlist(const std::string& path) {
  apx_netlist* n = nullptr;
  check(apx_netlist_read(path.c_str(), &n));
  return NetPtr(n);
}

AsgPtr load_assignment(const apx_netlist* net, const std::string& path, std::optional<int> k) {
  apx_assignment* a = nullptr;
  if (!path.empty()) {
    check(apx_assignment_read(net, path.c_str(), &a));
  } else {
    check(apx_assignment_uniform(net, k.value_or(0), &a));
  }
  return AsgPtr(a);
}

void emit(apx_report* r, const std::string& format, const std::string& out) {
  check(apx_report_write(r, format.c_str(), out.c_str()));
}

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
  cmd->add_option("--adder", m.adder, "accurate|trunc|median|loa|ama1|ama2|ama5|eta1")->capture_default_str();
  cmd->add_option("--prob-mode", m.prob_mode, "uniform|marginal|markov (param is an alias of markov)")
      ->capture_default_str();
  cmd->add_flag("--no-refine", m.no_refine, "plain Median fill everywhere");
}

void add_sim_flags(CLI::App* cmd, SimFlags& s) {
  cmd->add_option("--samples", s.samples, "Monte-Carlo samples")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", s.seed, "random seed")->capture_default_str();
  auto* in = cmd->add_option("--input", s.input, "file of input values, one integer per line")->check(CLI::ExistingFile);
  cmd->add_option("--image", s.image, "8-bit PGM image fed as input stream")->check(CLI::ExistingFile)->excludes(in);
  cmd->add_option("--warmup", s.warmup, "steps discarded before measuring (default: 4x impulse length)");
  cmd->add_option("--threads", s.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error analysis and bit-width optimization for approximate adders"};
  app.require_subcommand(1);
  app.fallthrough(false);

  std::string format = "csv";
  std::string out = "-";
  std::string netlist_path;
  std::string assignment_path;
  std::optional<int> uniform_k;
  ModelFlags model;
  SimFlags sim;

  auto add_common = [&](CLI::App* cmd, bool wants_assignment) {
    cmd->add_option("netlist", netlist_path, "netlist file")->required()->check(CLI::ExistingFile);
    if (wants_assignment) {
      auto* as = cmd->add_option("--assignment", assignment_path, "approximate bits per adder")->check(CLI::ExistingFile);
      cmd->add_option("--k", uniform_k, "same k for every adder")->excludes(as)->check(CLI::Range(0, 62));
    }
    cmd->add_option("--format", format, "csv|text")->capture_default_str()->check(CLI::IsMember({"csv", "text"}));
  };

  // check-uniformity
  auto* cu = app.add_subcommand("check-uniformity", "DFT test of how many low-order bits are uniform");
  std::string samples_path;
  int bits = 8;
  double eps = 0.06;
  cu->add_option("samples", samples_path, "unsigned samples, one per line, or a .pgm image")->required()->check(CLI::ExistingFile);
  cu->add_option("--bits", bits, "sample width N")->capture_default_str()->check(CLI::Range(1, 24));
  cu->add_option("--eps", eps, "threshold on |F[m 2^(N-k)]|")->capture_default_str()->check(CLI::PositiveNumber);
  cu->add_option("--format", format, "csv|text")->capture_default_str()->check(CLI::IsMember({"csv", "text"}));
  cu->add_option("--out", out, "report path, - for stdout")->capture_default_str();

  // analyze
  auto* an = app.add_subcommand("analyze", "analytical output noise for an assignment");
  add_common(an, true);
  add_model_flags(an, model);
  an->add_option("--out", out, "report path, - for stdout")->capture_default_str();

  // optimize
  auto* op = app.add_subcommand("optimize", "maximize approximate bits under a noise budget");
  add_common(op, false);
  add_model_flags(op, model);
  double target_db = 0.0;
  int tabu_iters = 200, tenure = 7;
  std::uint64_t opt_seed = 0;
  std::string report_path;
  op->add_option("--target-db", target_db, "output noise-power budget in dB")->required();
  op->add_option("--out", out, "assignment path, - for stdout")->capture_default_str();
  op->add_option("--report", report_path, "predicted noise report path");
  op->add_option("--tabu-iters", tabu_iters, "tabu iterations")->capture_default_str()->check(CLI::NonNegativeNumber);
  op->add_option("--tenure", tenure, "tabu tenure")->capture_default_str()->check(CLI::PositiveNumber);
  op->add_option("--seed", opt_seed, "tie-break seed (0: id order)")->capture_default_str();

  // simulate
  auto* si = app.add_subcommand("simulate", "bit-exact Monte-Carlo simulation");
  add_common(si, true);
  add_model_flags(si, model);
  add_sim_flags(si, sim);
  si->add_option("--out", out, "report path, - for stdout")->capture_default_str();

  // compare
  auto* cmp = app.add_subcommand("compare", "uniform and parameterized model against simulation");
  add_common(cmp, true);
  add_model_flags(cmp, model);
  add_sim_flags(cmp, sim);
  cmp->add_option("--out", out, "report path, - for stdout")->capture_default_str();

  // bench gen
  auto* bench = app.add_subcommand("bench", "benchmark circuits");
  bench->require_subcommand(1);
  auto* gen = bench->add_subcommand("gen", "write a benchmark netlist");
  std::string bench_name;
  int frac = 16;
  gen->add_option("--name", bench_name, "fir18|iir4|dct8|fig3a|fig3b")
      ->required()
      ->check(CLI::IsMember({"fir18", "iir4", "dct8", "fig3a", "fig3b"}));
  gen->add_option("--frac", frac, "fractional bits N")->capture_default_str()->check(CLI::Range(1, 30));
  gen->add_option("--out", out, "netlist path, - for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cu->parsed()) {
      apx_report* r = nullptr;
      check(apx_check_uniformity(samples_path.c_str(), bits, eps, &r));
      RepPtr rep(r);
      emit(rep.get(), format, out);
    } else if (an->parsed()) {
      auto net = load_netlist(netlist_path);
      auto asg = load_assignment(net.get(), assignment_path, uniform_k);
      const auto mo = model.options();
      apx_report* r = nullptr;
      check(apx_analyze(net.get(), asg.get(), &mo, &r));
      RepPtr rep(r);
      emit(rep.get(), format, out);
    } else if (op->parsed()) {
      auto net = load_netlist(netlist_path);
      apx_optimize_options oo;
      apx_optimize_options_init(&oo);
      oo.model = model.options();
      oo.target_db = target_db;
      oo.max_tabu_iters = tabu_iters;
      oo.tabu_tenure = tenure;
      oo.seed = opt_seed;
      apx_assignment* a = nullptr;
      apx_report* r = nullptr;
      check(apx_optimize(net.get(), &oo, &a, &r));
      AsgPtr asg(a);
      RepPtr rep(r);
      check(apx_assignment_write(net.get(), asg.get(), out.c_str()));
      if (!report_path.empty()) emit(rep.get(), format, report_path);
      if (!apx_report_feasible(rep.get())) {
        std::fprintf(stderr, "apxtool: target %.2f dB cannot be met with any approximate bit; all adders left exact\n",
                     target_db);
        return 1;
      }
    } else if (si->parsed() || cmp->parsed()) {
      auto net = load_netlist(netlist_path);
      auto asg = load_assignment(net.get(), assignment_path, uniform_k);
      const auto mo = model.options();
      const auto so = sim.options();
      apx_report* r = nullptr;
      check(si->parsed() ? apx_simulate(net.get(), asg.get(), &mo, &so, &r)
                         : apx_compare(net.get(), asg.get(), &mo, &so, &r));
      RepPtr rep(r);
      emit(rep.get(), format, out);
    } else if (gen->parsed()) {
      apx_netlist* n = nullptr;
      check(apx_benchmark_generate(bench_name.c_str(), frac, &n));
      NetPtr net(n);
      check(apx_netlist_write(net.get(), out.c_str()));
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "apxtool: %s: %s\n", apx_status_name(f.status), apx_last_error());
    return f.status == APX_ERR_INTERNAL ? 2 : 1;
  }
  return 0;
}
