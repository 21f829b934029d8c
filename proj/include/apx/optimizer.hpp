#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apx/errormodel.hpp"
#include "apx/netlist.hpp"
#include "apx/noise.hpp"

namespace apx {

struct OptimizeConfig {
  /// Noise-power budget in dB per output (declaration order of outputs), or
  /// a single value applied to every output.
  std::vector<double> target_db;
  AdderKind kind = AdderKind::LOA;
  ModelOptions model;
  int max_tabu_iters = 200;
  int tabu_tenure = 7;
  /// Tie-break among equally small k during the tabu stage; 0 means id order.
  std::uint64_t seed = 0;
  /// Optional per-node weights of the reported objective sum w_i k_i;
  /// empty means 1 for every adder.
  std::vector<double> weights;
};

struct StageTrace {
  std::string stage;
  int total_k = 0;
  double worst_db = 0.0;
};

struct OptResult {
  Assignment assignment;
  NoiseReport predicted;
  std::vector<StageTrace> trace;
  double objective = 0.0;
  bool feasible = true;  ///< false when no adder could be approximated at all
};

/// Analytical model with cached per-adder statistics and incremental
/// re-evaluation of the nodes downstream of a change.
class ModelEvaluator {
 public:
  ModelEvaluator(const Netlist& netlist, AdderKind kind, ModelOptions options, const GainTable& gains);
  ~ModelEvaluator();
  ModelEvaluator(const ModelEvaluator&) = delete;
  ModelEvaluator& operator=(const ModelEvaluator&) = delete;

  /// Per-output normalized MSE (output slot order) for `assignment`.
  std::vector<double> output_mse(const Assignment& assignment);
  NoiseReport report(const Assignment& assignment);

 private:
  struct Impl;
  Impl* impl_;
};

/// Linear-scale budgets per output slot from a config.
std::vector<double> output_budgets(const Netlist& netlist, const OptimizeConfig& config);

Assignment minimum_width(const Netlist& netlist, const GainTable& gains, const OptimizeConfig& config);
Assignment greedy_descent(const Netlist& netlist, const GainTable& gains, const Assignment& start,
                          const OptimizeConfig& config);
Assignment tabu_refine(const Netlist& netlist, const GainTable& gains, const Assignment& start,
                       const OptimizeConfig& config);

/// Minimum width, greedy descent, then tabu refinement, output by output in
/// id order. Adders whose +1 would break an already handled output are
/// frozen for the following cones.
OptResult optimize(const Netlist& netlist, const GainTable& gains, const OptimizeConfig& config);
OptResult optimize(const Netlist& netlist, const OptimizeConfig& config);

}  // namespace apx
