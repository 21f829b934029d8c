#include "apx/uniformity.hpp"

#include <fftw3.h>

#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

#include "apx/error.hpp"

namespace apx {

namespace {

constexpr int kMaxBits = 24;

void check_bits(int bits) {
  if (bits < 1 || bits > kMaxBits) throw Error(ErrorCode::InvalidArgument, "PMF width must be 1..24 bits");
}

// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Pmf pmf_from_samples(const std::vector<std::uint64_t>& samples, int bits) {
  check_bits(bits);
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no samples");
  const std::uint64_t size = std::uint64_t{1} << bits;
  std::vector<double> counts(size, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] >= size) {
      throw Error(ErrorCode::InvalidArgument,
                  "sample " + std::to_string(i) + " = " + std::to_string(samples[i]) + " out of range for " +
                      std::to_string(bits) + " bits");
    }
    counts[samples[i]] += 1.0;
  }
  return pmf_from_counts(counts, bits);
}

Pmf pmf_from_counts(const std::vector<double>& counts, int bits) {
  check_bits(bits);
  if (counts.size() != (std::size_t{1} << bits)) throw Error(ErrorCode::InvalidArgument, "count vector length must be 2^bits");
  double total = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative or NaN count");
    total += c;
  }
  if (total <= 0.0) throw Error(ErrorCode::InvalidArgument, "empty distribution");
  Pmf pmf{bits, counts};
  for (double& p : pmf.probs) p /= total;
  return pmf;
}

Pmf low_bits_marginal(const Pmf& pmf, int k) {
  if (k < 1 || k > pmf.bits) throw Error(ErrorCode::InvalidArgument, "k out of range");
  Pmf out{k, std::vector<double>(std::size_t{1} << k, 0.0)};
  const std::size_t mask = out.probs.size() - 1;
  for (std::size_t n = 0; n < pmf.probs.size(); ++n) out.probs[n & mask] += pmf.probs[n];
  return out;
}

std::vector<std::complex<double>> spectrum(const Pmf& pmf) {
  check_bits(pmf.bits);
  const int n = 1 << pmf.bits;
  if (pmf.probs.size() != static_cast<std::size_t>(n)) throw Error(ErrorCode::InvalidArgument, "PMF length must be 2^bits");
  auto* in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n)));
  auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n)));
  std::unique_ptr<fftw_complex, decltype(&fftw_free)> in_guard(in, fftw_free), out_guard(out, fftw_free);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (int i = 0; i < n; ++i) {
    in[i][0] = pmf.probs[static_cast<std::size_t>(i)];
    in[i][1] = 0.0;
  }
  fftw_execute(plan);
  std::vector<std::complex<double>> f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = {out[i][0], out[i][1]};
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return f;
}

SpectrumReport uniform_k_max(const Pmf& pmf, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const auto f = spectrum(pmf);
  const int nb = pmf.bits;
  SpectrumReport rep;
  rep.epsilon = epsilon;
  rep.max_coeff.assign(static_cast<std::size_t>(nb) + 1, 0.0);
  for (int k = 1; k <= nb; ++k) {
    const std::size_t stride = std::size_t{1} << (nb - k);
    double mx = 0.0;
    for (std::size_t m = 1; m < (std::size_t{1} << k); ++m) mx = std::max(mx, std::abs(f[m * stride]));
    rep.max_coeff[static_cast<std::size_t>(k)] = mx;
  }
  // Index sets grow with k, so the maxima are non-decreasing and the first
  // failure ends the scan.
  for (int k = 1; k <= nb && rep.max_coeff[static_cast<std::size_t>(k)] <= epsilon; ++k) rep.k_max = k;
  return rep;
}

std::vector<std::uint64_t> read_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<std::uint64_t> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    std::uint64_t v = 0;
    std::size_t used = 0;
    try {
      if (tok.front() == '-') throw std::invalid_argument("negative");
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    std::string extra;
    if (used != tok.size() || (ss >> extra)) throw ParseError(lineno, "expected one unsigned integer, got '" + line + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace apx
