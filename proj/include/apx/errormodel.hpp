#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "apx/adders.hpp"
#include "apx/bitprocess.hpp"
#include "apx/netlist.hpp"

namespace apx {

/// Moments of one adder's error e = (exact sum) - (approximate sum), in LSB
/// units of the 2^-N grid.
struct ErrorStats {
  double mean = 0.0;
  double mse = 0.0;
  BitProbs out_probs;        ///< P(s_i = 1) for the k approximate sum bits
  double carry_prob = 0.0;   ///< P(carry into the accurate part = 1)
  BitProcess output;         ///< law of the adder's output bits (all positions requested)

  double var() const { return mse > mean * mean ? mse - mean * mean : 0.0; }
};

enum class CarryMode { Positional, Stationary };

/// P(c_i = 1) per position of a table-based lower part. Positional iterates
/// the carry recursion from c_{-1} = 0; stationary solves its affine fixed
/// point position by position.
std::vector<double> carry_profile(AdderKind kind, const BitProbs& a, const BitProbs& b, int k, CarryMode mode);

/// P(s_i = 1) given independent operand bits and carry-in probabilities
/// `carry_in[i]` = P(c_{i-1} = 1).
std::vector<double> sum_profile(AdderKind kind, const BitProbs& a, const BitProbs& b,
                                const std::vector<double>& carry_in);

struct AdderContext {
  int carry_in = 0;                          ///< 1 for subtractors (a + ~b + 1)
  std::optional<std::uint64_t> fill;         ///< Median lower-part override
  int out_bits = 0;                          ///< positions of `output`; at least k
};

/// Exact first and second moments of the error of one adder whose operands
/// follow the given bit processes (operands independent of each other).
/// Table-based kinds run a moment-propagation DP from the LSB with state
/// (carry, previous operand bits, previous sum bit); ETA-I runs it from the
/// MSB with a trigger flag. Positions at and above k are propagated through
/// an exact full adder to produce the output law.
ErrorStats adder_stats(AdderKind kind, int k, const BitProcess& a, const BitProcess& b, const AdderContext& ctx = {});

/// Probability rule through a constant multiplier: shifts for +-2^l (with
/// 1 - P for negative coefficients), 0.5 for any other nonzero coefficient,
/// all-zero for c = 0.
BitProbs mult_prob_rule(const Coefficient& c, const BitProbs& in, int k_out);
/// Same rule on a full bit process, preserving inter-bit correlation.
BitProcess mult_process_rule(const Coefficient& c, const BitProcess& in, int k_out);

/// Median lower-part constant for an adder with k3 approximate bits whose
/// operands come from adders of the given kinds and widths. Refines to
/// 2^(k3+1)-1 when both parents are Median and either k3 <= min(k1, k2) or
/// k3 lies between them; otherwise 2^k3 - 1.
std::uint64_t ma_fill_constant(int k3, AdderKind parent1, int k1, AdderKind parent2, int k2);

enum class ProbMode { Uniform, Marginal, Markov };

std::string_view to_string(ProbMode mode);
ProbMode parse_prob_mode(std::string_view name);

struct ModelOptions {
  ProbMode mode = ProbMode::Markov;
  bool refine_median = true;
};

/// Fill overrides chosen for each Median adder, indexed by node. Shared by
/// the model and the simulator so both describe the same hardware.
std::vector<std::optional<std::uint64_t>> median_fills(const Netlist& netlist, const Assignment& assignment,
                                                       AdderKind kind, bool refine);

/// Statistics of adder node `index` from the processes of its two sources:
/// applies the subtrahend complement and carry-in, the probability mode's
/// simplification of the operands, and strips output correlation except for
/// AMA2 in markov mode.
ErrorStats adder_node_stats(const Netlist& netlist, std::size_t index, AdderKind kind, int k,
                            std::optional<std::uint64_t> fill, const BitProcess& src0, const BitProcess& src1,
                            ProbMode mode);

struct Propagation {
  std::vector<BitProcess> process;                    ///< per node, N positions
  std::vector<std::optional<ErrorStats>> stats;       ///< per node, set for adders
  std::vector<std::optional<std::uint64_t>> fills;    ///< per node
  int iterations = 1;                                 ///< sweeps used for feedback loops
};

/// Static-probability propagation through the netlist, computing every
/// adder's error statistics on the way. Primary inputs are fair coins,
/// delays pass their source through, constant multipliers apply
/// mult_process_rule and adders emit their output law. Feedback loops are
/// iterated to a fixed point.
Propagation propagate_probs(const Netlist& netlist, const Assignment& assignment, AdderKind kind,
                            const ModelOptions& options = {});

}  // namespace apx
