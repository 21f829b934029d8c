#include "apx/apx.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>
#include <variant>

#include "apx/benchmarks.hpp"
#include "apx/error.hpp"
#include "apx/optimizer.hpp"
#include "apx/pgm.hpp"
#include "apx/report.hpp"

struct apx_netlist {
  std::shared_ptr<const apx::Netlist> net;
};

struct apx_assignment {
  apx::Assignment a;
};

struct apx_report {
  std::shared_ptr<const apx::Netlist> net;
  apx::Assignment assignment;
  apx::ReportHeader header;
  std::variant<apx::NoiseReport, apx::EmpiricalReport, apx::Comparison, apx::SpectrumReport> data;
  bool feasible = true;
  std::string rendered;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
apx_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return APX_OK;
  } catch (const apx::Error& e) {
    g_last_error = e.what();
    return static_cast<apx_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return APX_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return APX_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw apx::Error(apx::ErrorCode::InvalidArgument, std::string("null ") + what);
}

apx::ModelOptions model_of(const apx_model_options* o, apx::AdderKind* kind) {
  need(o, "model options");
  need(o->adder_kind, "adder kind");
  *kind = apx::parse_adder_kind(o->adder_kind);
  apx::ModelOptions m;
  if (o->prob_mode) m.mode = apx::parse_prob_mode(o->prob_mode);
  m.refine_median = o->refine_median != 0;
  return m;
}

apx::SimConfig sim_of(const apx_sim_options* o, const apx::ModelOptions& m) {
  need(o, "simulation options");
  apx::SimConfig c;
  c.samples = o->samples;
  c.seed = o->seed;
  switch (o->source) {
    case APX_INPUT_UNIFORM: c.source = apx::InputSource::Uniform; break;
    case APX_INPUT_FILE: c.source = apx::InputSource::File; break;
    case APX_INPUT_IMAGE: c.source = apx::InputSource::Image; break;
    default: throw apx::Error(apx::ErrorCode::InvalidArgument, "unknown input source");
  }
  if (c.source != apx::InputSource::Uniform) {
    need(o->input_path, "input path");
    c.path = o->input_path;
  }
  if (o->warmup >= 0) c.warmup = static_cast<std::size_t>(o->warmup);
  c.threads = o->threads;
  c.refine_median = m.refine_median;
  return c;
}

void check_assignment(const apx_netlist* net, const apx_assignment* a) {
  need(net, "netlist");
  need(a, "assignment");
  if (a->a.size() != net->net->size()) throw apx::Error(apx::ErrorCode::InvalidArgument, "assignment belongs to another netlist");
}

apx::ReportHeader model_header(const apx_netlist* net, const apx_assignment* a, apx::AdderKind kind,
                               const apx::ModelOptions& m) {
  return {{"kind", std::string(apx::to_string(kind))},
          {"frac_bits", std::to_string(net->net->frac_bits())},
          {"prob_mode", std::string(apx::to_string(m.mode))},
          {"assignment_hash", apx::hex_hash(apx::assignment_hash(*net->net, a->a))}};
}

}  // namespace

extern "C" {

const char* apx_last_error(void) { return g_last_error.c_str(); }

const char* apx_status_name(apx_status s) {
  switch (s) {
    case APX_OK: return "ok";
    case APX_ERR_PARSE: return "parse error";
    case APX_ERR_INVALID_ARGUMENT: return "invalid argument";
    case APX_ERR_IO: return "i/o error";
    case APX_ERR_INFEASIBLE: return "infeasible";
    case APX_ERR_OVERFLOW: return "overflow";
    case APX_ERR_UNSTABLE: return "unstable";
    case APX_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

apx_status apx_netlist_read(const char* path, apx_netlist** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "output pointer");
    auto n = std::make_shared<apx::Netlist>(apx::read_netlist_file(path));
    apx::require_valid(*n);
    *out = new apx_netlist{std::move(n)};
  });
}

apx_status apx_netlist_parse(const char* text, apx_netlist** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "output pointer");
    auto n = std::make_shared<apx::Netlist>(apx::parse_netlist(std::string_view(text)));
    apx::require_valid(*n);
    *out = new apx_netlist{std::move(n)};
  });
}

apx_status apx_benchmark_generate(const char* name, int frac_bits, apx_netlist** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "output pointer");
    *out = new apx_netlist{std::make_shared<apx::Netlist>(apx::generate_benchmark(name, frac_bits))};
  });
}

apx_status apx_netlist_write(const apx_netlist* net, const char* path) {
  return guarded([&] {
    need(net, "netlist");
    need(path, "path");
    apx::write_text(path, apx::render_netlist(*net->net));
  });
}

int apx_netlist_frac_bits(const apx_netlist* net) { return net ? net->net->frac_bits() : 0; }
size_t apx_netlist_adder_count(const apx_netlist* net) { return net ? net->net->adder_indices().size() : 0; }
size_t apx_netlist_output_count(const apx_netlist* net) { return net ? net->net->output_indices().size() : 0; }
void apx_netlist_free(apx_netlist* net) { delete net; }

apx_status apx_assignment_uniform(const apx_netlist* net, int k, apx_assignment** out) {
  return guarded([&] {
    need(net, "netlist");
    need(out, "output pointer");
    *out = new apx_assignment{apx::Assignment(*net->net, k)};
  });
}

apx_status apx_assignment_read(const apx_netlist* net, const char* path, apx_assignment** out) {
  return guarded([&] {
    need(net, "netlist");
    need(path, "path");
    need(out, "output pointer");
    *out = new apx_assignment{apx::read_assignment_file(*net->net, path)};
  });
}

apx_status apx_assignment_write(const apx_netlist* net, const apx_assignment* a, const char* path) {
  return guarded([&] {
    check_assignment(net, a);
    need(path, "path");
    apx::write_text(path, apx::render_assignment(*net->net, a->a));
  });
}

apx_status apx_assignment_set(const apx_netlist* net, apx_assignment* a, const char* adder_id, int k) {
  return guarded([&] {
    check_assignment(net, a);
    need(adder_id, "adder id");
    a->a.set(*net->net, adder_id, k);
  });
}

apx_status apx_assignment_get(const apx_netlist* net, const apx_assignment* a, const char* adder_id, int* k) {
  return guarded([&] {
    check_assignment(net, a);
    need(adder_id, "adder id");
    need(k, "output pointer");
    *k = a->a.get(*net->net, adder_id);
  });
}

int apx_assignment_total(const apx_assignment* a) { return a ? a->a.total() : 0; }

uint64_t apx_assignment_hash(const apx_netlist* net, const apx_assignment* a) {
  return net && a ? apx::assignment_hash(*net->net, a->a) : 0;
}

void apx_assignment_free(apx_assignment* a) { delete a; }

void apx_model_options_init(apx_model_options* o) {
  if (!o) return;
  o->adder_kind = "loa";
  o->prob_mode = "markov";
  o->refine_median = 1;
}

void apx_optimize_options_init(apx_optimize_options* o) {
  if (!o) return;
  apx_model_options_init(&o->model);
  o->target_db = -40.0;
  o->max_tabu_iters = 200;
  o->tabu_tenure = 7;
  o->seed = 0;
}

void apx_sim_options_init(apx_sim_options* o) {
  if (!o) return;
  o->samples = 100000;
  o->seed = 1;
  o->source = APX_INPUT_UNIFORM;
  o->input_path = nullptr;
  o->warmup = -1;
  o->threads = 1;
}

apx_status apx_analyze(const apx_netlist* net, const apx_assignment* a, const apx_model_options* model,
                       apx_report** out) {
  return guarded([&] {
    check_assignment(net, a);
    need(out, "output pointer");
    apx::AdderKind kind;
    const auto m = model_of(model, &kind);
    const apx::GainTable gains(*net->net);
    auto r = std::make_unique<apx_report>();
    r->net = net->net;
    r->assignment = a->a;
    r->header = model_header(net, a, kind, m);
    r->data = apx::analyze(*net->net, a->a, kind, gains, m);
    *out = r.release();
  });
}

apx_status apx_optimize(const apx_netlist* net, const apx_optimize_options* opt, apx_assignment** out_assignment,
                        apx_report** out_report) {
  return guarded([&] {
    need(net, "netlist");
    need(opt, "optimize options");
    need(out_assignment, "output pointer");
    need(out_report, "output pointer");
    apx::OptimizeConfig cfg;
    cfg.model = model_of(&opt->model, &cfg.kind);
    cfg.target_db = {opt->target_db};
    cfg.max_tabu_iters = opt->max_tabu_iters;
    cfg.tabu_tenure = opt->tabu_tenure;
    cfg.seed = opt->seed;
    const auto res = apx::optimize(*net->net, cfg);
    auto a = std::make_unique<apx_assignment>(apx_assignment{res.assignment});
    auto r = std::make_unique<apx_report>();
    r->net = net->net;
    r->assignment = res.assignment;
    r->header = model_header(net, a.get(), cfg.kind, cfg.model);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", opt->target_db);
    r->header.emplace_back("target_db", buf);
    r->header.emplace_back("total_k", std::to_string(res.assignment.total()));
    for (const auto& t : res.trace) {
      std::snprintf(buf, sizeof buf, "%.2f", t.worst_db);
      r->header.emplace_back("stage " + t.stage, "total_k=" + std::to_string(t.total_k) + " worst_db=" + buf);
    }
    r->data = res.predicted;
    r->feasible = res.feasible;
    *out_assignment = a.release();
    *out_report = r.release();
  });
}

apx_status apx_simulate(const apx_netlist* net, const apx_assignment* a, const apx_model_options* model,
                        const apx_sim_options* sim, apx_report** out) {
  return guarded([&] {
    check_assignment(net, a);
    need(out, "output pointer");
    apx::AdderKind kind;
    const auto m = model_of(model, &kind);
    const auto cfg = sim_of(sim, m);
    auto r = std::make_unique<apx_report>();
    r->net = net->net;
    r->assignment = a->a;
    auto rep = apx::simulate(*net->net, a->a, kind, cfg);
    r->header = {{"kind", std::string(apx::to_string(kind))},
                 {"frac_bits", std::to_string(net->net->frac_bits())},
                 {"assignment_hash", apx::hex_hash(apx::assignment_hash(*net->net, a->a))},
                 {"seed", std::to_string(cfg.seed)},
                 {"samples", std::to_string(rep.samples)},
                 {"warmup", std::to_string(rep.warmup)}};
    r->data = std::move(rep);
    *out = r.release();
  });
}

apx_status apx_compare(const apx_netlist* net, const apx_assignment* a, const apx_model_options* model,
                       const apx_sim_options* sim, apx_report** out) {
  return guarded([&] {
    check_assignment(net, a);
    need(out, "output pointer");
    apx::AdderKind kind;
    const auto m = model_of(model, &kind);
    const auto cfg = sim_of(sim, m);
    auto r = std::make_unique<apx_report>();
    r->net = net->net;
    r->assignment = a->a;
    auto cmp = apx::compare(*net->net, a->a, kind, cfg, m);
    r->header = {{"seed", std::to_string(cfg.seed)},
                 {"frac_bits", std::to_string(net->net->frac_bits())},
                 {"kind", std::string(apx::to_string(kind))},
                 {"assignment_hash", apx::hex_hash(apx::assignment_hash(*net->net, a->a))},
                 {"prob_mode", std::string(apx::to_string(m.mode))},
                 {"samples", std::to_string(cmp.sim.samples)}};
    r->data = std::move(cmp);
    *out = r.release();
  });
}

apx_status apx_check_uniformity(const char* path, int bits, double epsilon, apx_report** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "output pointer");
    const std::string p = path;
    std::vector<std::uint64_t> samples;
    if (p.size() > 4 && p.compare(p.size() - 4, 4, ".pgm") == 0) {
      const auto img = apx::read_pgm(p);
      for (auto v : apx::pgm_samples(img, bits)) samples.push_back(static_cast<std::uint64_t>(v));
    } else {
      samples = apx::read_samples_file(p);
    }
    auto r = std::make_unique<apx_report>();
    r->header = {{"bits", std::to_string(bits)}, {"samples", std::to_string(samples.size())}};
    r->data = apx::uniform_k_max(apx::pmf_from_samples(samples, bits), epsilon);
    *out = r.release();
  });
}

apx_status apx_report_render(apx_report* r, const char* format, const char** text) {
  return guarded([&] {
    need(r, "report");
    need(format, "format");
    need(text, "output pointer");
    const auto f = apx::parse_report_format(format);
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, apx::NoiseReport>) {
            r->rendered = apx::render_noise_report(*r->net, d, f, r->header);
          } else if constexpr (std::is_same_v<T, apx::EmpiricalReport>) {
            r->rendered = apx::render_sim_report(*r->net, r->assignment, d, f, r->header);
          } else if constexpr (std::is_same_v<T, apx::Comparison>) {
            r->rendered = apx::render_comparison(*r->net, d, f, r->header);
          } else {
            r->rendered = apx::render_uniformity(d, f, r->header);
          }
        },
        r->data);
    *text = r->rendered.c_str();
  });
}

apx_status apx_report_write(apx_report* r, const char* format, const char* path) {
  const char* text = nullptr;
  if (const auto s = apx_report_render(r, format, &text); s != APX_OK) return s;
  return guarded([&] {
    need(path, "path");
    apx::write_text(path, text);
  });
}

size_t apx_report_output_count(const apx_report* r) {
  if (!r) return 0;
  return std::visit(
      [](const auto& d) -> size_t {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, apx::Comparison>) {
          return d.sim.outputs.size();
        } else if constexpr (std::is_same_v<T, apx::SpectrumReport>) {
          return 0;
        } else {
          return d.outputs.size();
        }
      },
      r->data);
}

double apx_report_np_db(const apx_report* r, size_t i) {
  if (!r || i >= apx_report_output_count(r)) return std::numeric_limits<double>::quiet_NaN();
  return std::visit(
      [i](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, apx::Comparison>) {
          return d.sim.outputs[i].np_db;
        } else if constexpr (std::is_same_v<T, apx::SpectrumReport>) {
          return std::numeric_limits<double>::quiet_NaN();
        } else {
          return d.outputs[i].np_db;
        }
      },
      r->data);
}

double apx_report_mean_np_db(const apx_report* r) {
  if (!r) return std::numeric_limits<double>::quiet_NaN();
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, apx::Comparison>) {
          return d.sim.mean_np_db;
        } else if constexpr (std::is_same_v<T, apx::SpectrumReport>) {
          return std::numeric_limits<double>::quiet_NaN();
        } else {
          return d.mean_np_db;
        }
      },
      r->data);
}

int apx_report_k_max(const apx_report* r) {
  if (!r) return -1;
  if (const auto* s = std::get_if<apx::SpectrumReport>(&r->data)) return s->k_max;
  return -1;
}

int apx_report_feasible(const apx_report* r) { return r && r->feasible ? 1 : 0; }

void apx_report_free(apx_report* r) { delete r; }

}  // extern "C"
