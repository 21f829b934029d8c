#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace apx {

/// Static probabilities P(bit_i = 1) of the k low-order fractional bits of a
/// signal, values clamped to [0, 1].
struct BitProbs {
  std::vector<double> p;

  BitProbs() = default;
  explicit BitProbs(std::vector<double> probs);
  static BitProbs uniform(int n) { return BitProbs(std::vector<double>(static_cast<std::size_t>(n), 0.5)); }

  std::size_t size() const { return p.size(); }
  double operator[](std::size_t i) const { return p[i]; }
  bool operator==(const BitProbs&) const = default;
};

/// Joint law of a signal's low-order bits as a first-order Markov chain from
/// the LSB up: P(bit_0 = 1) and P(bit_i = 1 | bit_{i-1}). Independent and
/// constant bits are special cases. Positions past size() read as fair coins.
class BitProcess {
 public:
  enum class Mode { Independent, Markov, Constant };

  BitProcess() = default;

  static BitProcess independent(const BitProbs& probs);
  static BitProcess uniform(int n);
  static BitProcess constant(std::uint64_t value, int n);
  /// cond[i][prev] = P(bit_i = 1 | bit_{i-1} = prev); cond[0] is ignored.
  static BitProcess markov(double first, std::vector<std::array<double, 2>> cond);

  Mode mode() const { return mode_; }
  int size() const { return static_cast<int>(marg_.size()); }

  double marginal(int i) const;
  /// P(bit_i = 1 | bit_{i-1} = prev); the marginal for i == 0.
  double cond(int i, int prev) const;
  /// P(bit_i = 1 | bit_{i+1} = next), the chain read MSB-first.
  double reverse_cond(int i, int next) const;

  BitProbs marginals(int n) const;
  BitProbs marginals() const { return marginals(size()); }

  /// Drops inter-bit correlation, keeping the marginals.
  BitProcess independent_part() const;
  /// Bitwise complement.
  BitProcess flipped() const;
  /// Value scaled by 2^l: l >= 0 shifts zeros in at the bottom, l < 0 drops
  /// the |l| lowest bits. The result has `n` positions.
  BitProcess shifted(int l, int n) const;
  /// Truncated or padded (with fair coins) to n positions.
  BitProcess resized(int n) const;

  bool approx_equal(const BitProcess& other, double tol) const;
  double max_abs_diff(const BitProcess& other) const;

 private:
  void classify();

  Mode mode_ = Mode::Independent;
  std::vector<double> marg_;
  std::vector<std::array<double, 2>> cond_;
};

}  // namespace apx
