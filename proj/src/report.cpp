#include "apx/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "apx/error.hpp"

namespace apx {

namespace {

// Shortest of %.15g / %.17g that reads back exactly.
std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string db(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

using Row = std::vector<std::string>;

// A block of rows with a header, rendered as CSV or as an aligned table.
struct Table {
  Row head;
  std::vector<Row> rows;

  std::string render(ReportFormat f) const {
    std::string out;
    if (f == ReportFormat::Csv) {
      auto line = [&](const Row& r) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
        out += '\n';
      };
      line(head);
      for (const auto& r : rows) line(r);
      return out;
    }
    std::vector<std::size_t> w(head.size(), 0);
    auto widen = [&](const Row& r) {
      for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
    };
    widen(head);
    for (const auto& r : rows) widen(r);
    auto line = [&](const Row& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += "  ";
        out += r[i];
        if (i + 1 < r.size()) out.append(w[i] - r[i].size(), ' ');
      }
      out += '\n';
    };
    line(head);
    for (const auto& r : rows) line(r);
    return out;
  }
};

std::string header_text(const ReportHeader& h) {
  std::string out;
  for (const auto& [k, v] : h) out += "# " + k + ": " + v + "\n";
  return out;
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "text") return ReportFormat::Text;
  throw Error(ErrorCode::InvalidArgument, "unknown report format '" + std::string(name) + "' (csv|text)");
}

std::string hex_hash(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string render_noise_report(const Netlist& net, const NoiseReport& rep, ReportFormat format,
                                const ReportHeader& header) {
  Table adders{{"adder", "output", "k", "mean_lsb", "var_lsb", "G", "E"}, {}};
  for (const auto& c : rep.adders) {
    adders.rows.push_back({net.node(c.adder).id, net.node(c.output).id, std::to_string(c.k), full(c.mean_lsb),
                           full(c.var_lsb), full(c.dc_gain), full(c.energy)});
  }
  Table outs{{"output", "mean", "var", "mse", "mse_lsb", "np_db"}, {}};
  for (const auto& o : rep.outputs) {
    outs.rows.push_back({net.node(o.output).id, full(o.mean), full(o.var), full(o.mse), full(o.mse_lsb), db(o.np_db)});
  }
  if (rep.outputs.size() > 1) outs.rows.push_back({"mean_over_outputs", "", "", full(rep.mean_mse), "", db(rep.mean_np_db)});
  std::string out = header_text(header);
  if (!rep.adders.empty()) out += adders.render(format) + "\n";
  return out + outs.render(format);
}

std::string render_sim_report(const Netlist& net, const Assignment& asg, const EmpiricalReport& rep,
                              ReportFormat format, const ReportHeader& header) {
  Table adders{{"adder", "k", "mean_lsb", "var_lsb", "mse_lsb", "se_mse_lsb"}, {}};
  for (const auto& a : rep.adders) {
    adders.rows.push_back({net.node(a.node).id, std::to_string(asg[a.node]), full(a.mean_lsb), full(a.var_lsb),
                           full(a.mse_lsb), full(a.se_mse_lsb)});
  }
  Table outs{{"output", "mean", "var", "mse", "se_mse", "mse_lsb", "np_db"}, {}};
  for (const auto& o : rep.outputs) {
    outs.rows.push_back(
        {net.node(o.node).id, full(o.mean), full(o.var), full(o.mse), full(o.se_mse), full(o.mse_lsb), db(o.np_db)});
  }
  if (rep.outputs.size() > 1) outs.rows.push_back({"mean_over_outputs", "", "", full(rep.mean_mse), "", "", db(rep.mean_np_db)});
  std::string out = header_text(header);
  if (!rep.adders.empty()) out += adders.render(format) + "\n";
  return out + outs.render(format);
}

Comparison compare(const Netlist& net, const Assignment& asg, AdderKind kind, const SimConfig& sim,
                   const ModelOptions& param_options) {
  const GainTable gains(net);
  Comparison c;
  ModelOptions uni = param_options;
  uni.mode = ProbMode::Uniform;
  c.uniform = analyze(net, asg, kind, gains, uni);
  c.param = analyze(net, asg, kind, gains, param_options);
  SimConfig s = sim;
  s.refine_median = param_options.refine_median;
  c.sim = simulate(net, asg, kind, s);
  return c;
}

std::string render_comparison(const Netlist& net, const Comparison& c, ReportFormat format, const ReportHeader& header) {
  Table t{{"output", "mse_uniform", "mse_param", "mse_sim", "se_mse_sim", "np_analytical_uniform", "np_analytical_param",
           "np_simulated"},
          {}};
  for (std::size_t o = 0; o < c.sim.outputs.size(); ++o) {
    const auto& u = c.uniform.outputs[o];
    const auto& p = c.param.outputs[o];
    const auto& s = c.sim.outputs[o];
    t.rows.push_back({net.node(s.node).id, full(u.mse), full(p.mse), full(s.mse), full(s.se_mse), db(u.np_db),
                      db(p.np_db), db(s.np_db)});
  }
  if (c.sim.outputs.size() > 1) {
    t.rows.push_back({"mean_over_outputs", full(c.uniform.mean_mse), full(c.param.mean_mse), full(c.sim.mean_mse), "",
                      db(c.uniform.mean_np_db), db(c.param.mean_np_db), db(c.sim.mean_np_db)});
  }
  return header_text(header) + t.render(format);
}

std::string render_uniformity(const SpectrumReport& rep, ReportFormat format, const ReportHeader& header) {
  Table t{{"k", "max_coeff", "uniform"}, {}};
  for (std::size_t k = 1; k < rep.max_coeff.size(); ++k) {
    t.rows.push_back({std::to_string(k), full(rep.max_coeff[k]), rep.max_coeff[k] <= rep.epsilon ? "yes" : "no"});
  }
  ReportHeader h = header;
  h.emplace_back("epsilon", full(rep.epsilon));
  h.emplace_back("k_max", std::to_string(rep.k_max));
  return header_text(h) + t.render(format);
}

void write_text(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

}  // namespace apx
