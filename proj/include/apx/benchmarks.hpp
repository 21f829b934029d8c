#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apx/netlist.hpp"

namespace apx {

constexpr int kDefaultBenchFrac = 16;

/// 18-tap direct-form-I lowpass: 17 delays, 18 multipliers, 17 chained adders.
/// Default taps: Hamming-windowed sinc, cutoff 0.25 of Nyquist, unit DC gain.
Netlist gen_fir18(int frac_bits = kDefaultBenchFrac, const std::optional<std::vector<double>>& taps = std::nullopt);
std::vector<double> fir18_default_taps();

/// 4th-order Butterworth lowpass (cutoff 0.3 of Nyquist, bilinear transform)
/// in direct form II: 4 delays, 4 feedback and 4 feedforward adders.
Netlist gen_iir4(int frac_bits = kDefaultBenchFrac);

struct FilterCoefficients {
  std::vector<double> b;  ///< numerator, b[0] first
  std::vector<double> a;  ///< denominator, a[0] = 1
};
FilterCoefficients butterworth_lowpass(int order, double cutoff);

/// 8x8 multiplierless transform: an 8-point add/subtract butterfly applied
/// to every row, then to every column. 288 adders in 6 levels, 64 outputs.
Netlist gen_dct8(int frac_bits = kDefaultBenchFrac);

/// Two-level adder trees: adder3 = adder1 + adder2 (variant a), or
/// adder3 = adder1 + c * adder2 (variant b).
Netlist gen_fig3a(int frac_bits = kDefaultBenchFrac);
Netlist gen_fig3b(int frac_bits = kDefaultBenchFrac, const std::string& coefficient = "1/2");

/// Dispatch by name: fir18 | iir4 | dct8 | fig3a | fig3b.
Netlist generate_benchmark(const std::string& name, int frac_bits = kDefaultBenchFrac);

}  // namespace apx
