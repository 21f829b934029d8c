#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apx/noise.hpp"
#include "apx/simulator.hpp"
#include "apx/uniformity.hpp"

namespace apx {

enum class ReportFormat { Csv, Text };
ReportFormat parse_report_format(std::string_view name);

/// `# key: value` lines written ahead of every report.
using ReportHeader = std::vector<std::pair<std::string, std::string>>;

std::string hex_hash(std::uint64_t h);

/// Adder block (one row per adder and output it reaches), a blank line, then
/// the output block; multi-output reports end with a mean-over-outputs row.
std::string render_noise_report(const Netlist& netlist, const NoiseReport& report, ReportFormat format,
                                const ReportHeader& header = {});
std::string render_sim_report(const Netlist& netlist, const Assignment& assignment, const EmpiricalReport& report,
                              ReportFormat format, const ReportHeader& header = {});

/// Analytical noise power under uniform operand probabilities and under the
/// propagated ones, next to the simulated value.
struct Comparison {
  NoiseReport uniform;
  NoiseReport param;
  EmpiricalReport sim;
};

Comparison compare(const Netlist& netlist, const Assignment& assignment, AdderKind kind, const SimConfig& sim,
                   const ModelOptions& param_options = {});
std::string render_comparison(const Netlist& netlist, const Comparison& cmp, ReportFormat format,
                              const ReportHeader& header = {});

std::string render_uniformity(const SpectrumReport& report, ReportFormat format, const ReportHeader& header = {});

/// Writes `content` to `path` ("-" is stdout).
void write_text(const std::string& path, const std::string& content);

}  // namespace apx
