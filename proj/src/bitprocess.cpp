#include "apx/bitprocess.hpp"

#include <algorithm>
#include <cmath>

#include "apx/error.hpp"

namespace apx {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

BitProbs::BitProbs(std::vector<double> probs) : p(std::move(probs)) {
  for (auto& v : p) v = clamp01(v);
}

BitProcess BitProcess::independent(const BitProbs& probs) {
  BitProcess bp;
  bp.marg_ = probs.p;
  bp.cond_.resize(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) bp.cond_[i] = {probs.p[i], probs.p[i]};
  bp.classify();
  return bp;
}

BitProcess BitProcess::uniform(int n) { return independent(BitProbs::uniform(n)); }

BitProcess BitProcess::constant(std::uint64_t value, int n) {
  if (n < 64 && (value >> n) != 0) throw Error(ErrorCode::InvalidArgument, "constant fill does not fit the bit count");
  std::vector<double> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = static_cast<double>((value >> i) & 1);
  return independent(BitProbs(std::move(p)));
}

BitProcess BitProcess::markov(double first, std::vector<std::array<double, 2>> cond) {
  BitProcess bp;
  if (cond.empty()) return bp;
  bp.cond_ = std::move(cond);
  for (auto& row : bp.cond_) row = {clamp01(row[0]), clamp01(row[1])};
  first = clamp01(first);
  bp.cond_[0] = {first, first};
  bp.marg_.resize(bp.cond_.size());
  bp.marg_[0] = first;
  for (std::size_t i = 1; i < bp.cond_.size(); ++i) {
    const double prev = bp.marg_[i - 1];
    bp.marg_[i] = clamp01((1.0 - prev) * bp.cond_[i][0] + prev * bp.cond_[i][1]);
  }
  bp.classify();
  return bp;
}

void BitProcess::classify() {
  bool constant = true, independent = true;
  for (std::size_t i = 0; i < marg_.size(); ++i) {
    if (marg_[i] != 0.0 && marg_[i] != 1.0) constant = false;
    if (i > 0 && std::abs(cond_[i][0] - cond_[i][1]) > 1e-15) independent = false;
  }
  if (constant) {
    // Deterministic bits carry no correlation; normalize the rows.
    for (std::size_t i = 0; i < marg_.size(); ++i) cond_[i] = {marg_[i], marg_[i]};
    mode_ = Mode::Constant;
  } else {
    mode_ = independent ? Mode::Independent : Mode::Markov;
  }
}

double BitProcess::marginal(int i) const {
  if (i < 0 || i >= size()) return 0.5;
  return marg_[static_cast<std::size_t>(i)];
}

double BitProcess::cond(int i, int prev) const {
  if (i < 0 || i >= size()) return 0.5;
  if (i == 0) return marg_[0];
  return cond_[static_cast<std::size_t>(i)][static_cast<std::size_t>(prev)];
}

double BitProcess::reverse_cond(int i, int next) const {
  if (i < 0 || i >= size()) return 0.5;
  if (i + 1 >= size()) return marg_[static_cast<std::size_t>(i)];
  const double p1 = marg_[static_cast<std::size_t>(i)];
  const double next_given_1 = next ? cond(i + 1, 1) : 1.0 - cond(i + 1, 1);
  const double next_given_0 = next ? cond(i + 1, 0) : 1.0 - cond(i + 1, 0);
  const double denom = p1 * next_given_1 + (1.0 - p1) * next_given_0;
  if (denom <= 0.0) return p1;
  return clamp01(p1 * next_given_1 / denom);
}

BitProbs BitProcess::marginals(int n) const {
  std::vector<double> p(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = marginal(i);
  return BitProbs(std::move(p));
}

BitProcess BitProcess::independent_part() const { return independent(marginals()); }

BitProcess BitProcess::flipped() const {
  if (marg_.empty()) return *this;
  std::vector<std::array<double, 2>> c(cond_.size());
  for (std::size_t i = 1; i < cond_.size(); ++i) c[i] = {1.0 - cond_[i][1], 1.0 - cond_[i][0]};
  return markov(1.0 - marg_[0], std::move(c));
}

BitProcess BitProcess::shifted(int l, int n) const {
  if (n <= 0) return BitProcess{};
  std::vector<std::array<double, 2>> c(static_cast<std::size_t>(n));
  double first = 0.0;
  for (int i = 0; i < n; ++i) {
    const int src = i - l;
    std::array<double, 2> row;
    if (src < 0) {
      row = {0.0, 0.0};
    } else if (src == 0 || i == 0) {
      // First position taken from the source: no usable predecessor.
      const double m = marginal(src);
      row = {m, m};
    } else {
      row = {cond(src, 0), cond(src, 1)};
    }
    if (i == 0) first = row[0];
    c[static_cast<std::size_t>(i)] = row;
  }
  return markov(first, std::move(c));
}

BitProcess BitProcess::resized(int n) const { return shifted(0, n); }

double BitProcess::max_abs_diff(const BitProcess& other) const {
  const int n = std::max(size(), other.size());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    d = std::max(d, std::abs(marginal(i) - other.marginal(i)));
    if (i > 0) {
      d = std::max(d, std::abs(cond(i, 0) - other.cond(i, 0)));
      d = std::max(d, std::abs(cond(i, 1) - other.cond(i, 1)));
    }
  }
  return d;
}

bool BitProcess::approx_equal(const BitProcess& other, double tol) const {
  return size() == other.size() && max_abs_diff(other) <= tol;
}

}  // namespace apx
