#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace apx {

/// Distribution of an N-bit unsigned quantity: probs[n] = P(A = n).
struct Pmf {
  int bits = 0;
  std::vector<double> probs;
};

Pmf pmf_from_samples(const std::vector<std::uint64_t>& samples, int bits);
/// Normalizes non-negative counts (length 2^bits) to a PMF.
Pmf pmf_from_counts(const std::vector<double>& counts, int bits);
/// PMF of the k low-order bits.
Pmf low_bits_marginal(const Pmf& pmf, int k);

/// F[m] = sum_n P(A = n) exp(-j 2 pi m n / 2^N).
std::vector<std::complex<double>> spectrum(const Pmf& pmf);

struct SpectrumReport {
  std::vector<double> max_coeff;  ///< index k = 0..N; max_{0<m<2^k} |F[m 2^(N-k)]|, 0 for k = 0
  int k_max = 0;
  double epsilon = 0.0;
};

/// Largest k whose low bits pass the DFT uniformity test at threshold epsilon.
SpectrumReport uniform_k_max(const Pmf& pmf, double epsilon = 0.06);

/// One unsigned integer per line; blank lines and '#' comments ignored.
std::vector<std::uint64_t> read_samples_file(const std::string& path);

}  // namespace apx
