#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "apx/errormodel.hpp"
#include "apx/netlist.hpp"

namespace apx {

/// Response at one output to a unit impulse added at an adder's output.
struct TransferGain {
  std::vector<double> h;   ///< truncated impulse response
  double dc_gain = 0.0;    ///< sum h[n]
  double energy = 0.0;     ///< sum h[n]^2
};

constexpr double kDefaultGainTol = 1e-12;
constexpr std::size_t kMaxImpulseLength = 1000000;

/// Runs the ideal real-valued netlist (coefficients as applied on the grid,
/// no quantization) with all inputs zero and a unit impulse injected at
/// `adder`. Every output's response is recorded. Stops when the state is
/// exactly zero, or once the last 64 samples carry less than tol times the
/// accumulated energy. Throws Unstable if neither happens within
/// kMaxImpulseLength samples.
std::vector<TransferGain> impulse_responses(const Netlist& netlist, std::size_t adder, double tol = kDefaultGainTol);

TransferGain impulse_response(const Netlist& netlist, std::string_view adder_id, std::string_view output_id,
                              double tol = kDefaultGainTol);

/// Sum over time of |response| at every node to a unit impulse added at
/// node `inject` (inputs zero), and the length of the response.
struct NodeSpread {
  std::vector<double> l1;
  std::size_t length = 0;
};
NodeSpread node_spread(const Netlist& netlist, std::size_t inject, double tol = kDefaultGainTol);

/// Gains of every (adder, output) pair, computed once per netlist.
class GainTable {
 public:
  GainTable() = default;
  explicit GainTable(const Netlist& netlist, double tol = kDefaultGainTol);

  const std::vector<std::size_t>& outputs() const { return outputs_; }
  /// Adders in the fan-in cone of output slot `o`, ascending node index.
  const std::vector<std::size_t>& cone(std::size_t o) const { return cones_.at(o); }
  const TransferGain& gain(std::size_t adder, std::size_t o) const;
  /// Longest truncated impulse response over all pairs.
  std::size_t max_length() const { return max_len_; }

 private:
  std::vector<std::size_t> outputs_;
  std::vector<std::vector<std::size_t>> cones_;
  std::vector<std::vector<TransferGain>> gains_;  // [node][output slot], empty for non-adders
  std::size_t max_len_ = 0;
};

struct AdderContribution {
  std::size_t adder = 0;
  std::size_t output = 0;  ///< output node index
  int k = 0;
  double mean_lsb = 0.0;
  double var_lsb = 0.0;
  double dc_gain = 0.0;
  double energy = 0.0;
};

struct OutputNoise {
  std::size_t output = 0;  ///< node index
  double mean_lsb = 0.0;
  double var_lsb = 0.0;
  double mse_lsb = 0.0;
  double mean = 0.0;  ///< normalized to the 1.N grid
  double var = 0.0;
  double mse = 0.0;
  double np_db = 0.0;  ///< 10 log10(mse); -inf when mse is 0
};

struct NoiseReport {
  int frac_bits = 0;
  std::vector<AdderContribution> adders;
  std::vector<OutputNoise> outputs;
  double mean_mse = 0.0;    ///< average normalized MSE over outputs
  double mean_np_db = 0.0;  ///< 10 log10(mean_mse)

  const OutputNoise& worst() const;
};

double to_db(double mse);

/// Output mean M = sum mu_i G_i and variance V = sum sigma_i^2 E_i with the
/// adder errors taken as independent white sources.
NoiseReport aggregate_output_mse(const Netlist& netlist, const Assignment& assignment,
                                 const std::vector<std::optional<ErrorStats>>& stats, const GainTable& gains);

/// propagate_probs followed by aggregate_output_mse.
NoiseReport analyze(const Netlist& netlist, const Assignment& assignment, AdderKind kind, const GainTable& gains,
                    const ModelOptions& options = {});

}  // namespace apx
