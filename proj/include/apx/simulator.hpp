#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apx/adders.hpp"
#include "apx/netlist.hpp"

namespace apx {

enum class InputSource { Uniform, File, Image };

struct SimConfig {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  InputSource source = InputSource::Uniform;
  std::string path;                    ///< samples file or PGM image
  std::optional<std::size_t> warmup;   ///< default 4x the longest impulse response (stateful netlists)
  std::size_t chunk = 16384;           ///< uniform inputs: samples per independently seeded chunk
  int threads = 1;
  bool refine_median = true;
};

struct EmpiricalStats {
  std::size_t node = 0;
  std::size_t count = 0;
  double mean_lsb = 0.0;
  double var_lsb = 0.0;
  double mse_lsb = 0.0;
  double se_mse_lsb = 0.0;  ///< standard error of mse_lsb
  double mean = 0.0;        ///< normalized to the 1.N grid
  double var = 0.0;
  double mse = 0.0;
  double se_mse = 0.0;
  double np_db = 0.0;
};

struct EmpiricalReport {
  int frac_bits = 0;
  std::size_t samples = 0;
  std::size_t warmup = 0;
  std::uint64_t seed = 0;
  /// Output error = accurate reference - approximate circuit.
  std::vector<EmpiricalStats> outputs;
  /// Local error of each adder: exact sum of the operands it actually
  /// received minus its approximate result.
  std::vector<EmpiricalStats> adders;
  double mean_mse = 0.0;
  double mean_np_db = 0.0;
};

/// Bit-exact two's-complement execution of the approximate circuit and of
/// the accurate reference on the same input stream. Multipliers compute
/// floor(x p / 2^q) for the grid coefficient p / 2^q; delays are registers.
EmpiricalReport simulate(const Netlist& netlist, const Assignment& assignment, AdderKind kind,
                         const SimConfig& config = {});

/// Integer width (sign included) reserved for every node, from the L1 norm
/// of the input and error-injection responses plus a guard bit.
std::vector<int> node_widths(const Netlist& netlist);

/// Integers on the 2^-N grid, one per line, consumed in input order.
std::vector<std::int64_t> read_value_file(const std::string& path);

}  // namespace apx
