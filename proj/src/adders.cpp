#include "apx/adders.hpp"

#include <bit>
#include <string>

#include "apx/error.hpp"

namespace apx {

namespace {

template <typename F, typename G>
constexpr BitRule make_rule(F f, G g) {
  BitRule r;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        r.sum[BitRule::index(a, b, c)] = static_cast<std::uint8_t>(f(a, b, c));
        r.carry[BitRule::index(a, b, c)] = static_cast<std::uint8_t>(g(a, b, c));
      }
  return r;
}

constexpr int majority(int a, int b, int c) { return (a & b) | (a & c) | (b & c); }

// Mirror-adder approximation 1: exact carry except at (0,1,0); the sum is
// 1 only for (0,0,1) and (1,1,1).
constexpr BitRule kAma1 = make_rule([](int a, int b, int c) { return (!a && !b && c) || (a && b && c) ? 1 : 0; },
                                    [](int a, int b, int c) { return (!a && b && !c) ? 1 : majority(a, b, c); });

constexpr BitRule kAccurate = make_rule([](int a, int b, int c) { return a ^ b ^ c; }, majority);
constexpr BitRule kTrunc = make_rule([](int, int, int) { return 0; }, [](int, int, int) { return 0; });
constexpr BitRule kMedian = make_rule([](int, int, int) { return 1; }, [](int, int, int) { return 0; });
constexpr BitRule kLoa = make_rule([](int a, int b, int) { return a | b; }, [](int a, int b, int) { return a & b; });
constexpr BitRule kAma2 = make_rule([](int a, int b, int c) { return 1 - majority(a, b, c); }, majority);
constexpr BitRule kAma5 = make_rule([](int, int b, int) { return b; }, [](int a, int, int) { return a; });

constexpr std::uint64_t low_mask(int k) { return k >= 64 ? ~0ULL : ((1ULL << k) - 1); }

}  // namespace

std::string_view to_string(AdderKind kind) {
  switch (kind) {
    case AdderKind::Accurate: return "accurate";
    case AdderKind::Trunc: return "trunc";
    case AdderKind::Median: return "median";
    case AdderKind::LOA: return "loa";
    case AdderKind::AMA1: return "ama1";
    case AdderKind::AMA2: return "ama2";
    case AdderKind::AMA5: return "ama5";
    case AdderKind::ETA1: return "eta1";
  }
  return "?";
}

AdderKind parse_adder_kind(std::string_view name) {
  for (auto k : kAllAdderKinds)
    if (to_string(k) == name) return k;
  throw Error(ErrorCode::InvalidArgument,
              "unknown adder kind '" + std::string(name) + "' (accurate|trunc|median|loa|ama1|ama2|ama5|eta1)");
}

const BitRule& truth_table(AdderKind kind) {
  switch (kind) {
    case AdderKind::Accurate: return kAccurate;
    case AdderKind::Trunc: return kTrunc;
    case AdderKind::Median: return kMedian;
    case AdderKind::LOA: return kLoa;
    case AdderKind::AMA1: return kAma1;
    case AdderKind::AMA2: return kAma2;
    case AdderKind::AMA5: return kAma5;
    case AdderKind::ETA1: break;
  }
  throw Error(ErrorCode::InvalidArgument, "ETA-I lower part is a scan rule and has no truth table");
}

namespace {

void check_operands(AdderKind kind, int k, std::uint64_t a_low, std::uint64_t b_low,
                    const std::optional<std::uint64_t>& fill) {
  if (k < 0 || k > 62) throw Error(ErrorCode::InvalidArgument, "k out of range");
  if (a_low > low_mask(k) || b_low > low_mask(k)) throw Error(ErrorCode::InvalidArgument, "lower-part operand exceeds k bits");
  if (fill && kind != AdderKind::Median) throw Error(ErrorCode::InvalidArgument, "fill override only applies to the median adder");
  if (fill && *fill > low_mask(k + 1)) throw Error(ErrorCode::InvalidArgument, "fill override exceeds k+1 bits");
}

LowerPart fill_part(int k, std::uint64_t fill) { return {fill & low_mask(k), static_cast<int>((fill >> k) & 1)}; }

}  // namespace

LowerPart eval_lower_part_serial(AdderKind kind, int k, std::uint64_t a_low, std::uint64_t b_low, int carry_in,
                                 std::optional<std::uint64_t> fill) {
  check_operands(kind, k, a_low, b_low, fill);
  if (k == 0) return {0, carry_in};
  if (fill) return fill_part(k, *fill);
  LowerPart out;
  if (kind == AdderKind::ETA1) {
    bool triggered = false;
    for (int i = k - 1; i >= 0; --i) {
      const int a = (a_low >> i) & 1, b = (b_low >> i) & 1;
      if (!triggered && a && b) triggered = true;
      const int s = triggered ? 1 : (a ^ b);
      out.sum |= static_cast<std::uint64_t>(s) << i;
    }
    return out;
  }
  const BitRule& rule = truth_table(kind);
  int c = carry_in;
  for (int i = 0; i < k; ++i) {
    const int a = (a_low >> i) & 1, b = (b_low >> i) & 1;
    out.sum |= static_cast<std::uint64_t>(rule.f(a, b, c)) << i;
    c = rule.g(a, b, c);
  }
  out.carry = c;
  return out;
}

LowerPart eval_lower_part(AdderKind kind, int k, std::uint64_t a_low, std::uint64_t b_low, int carry_in,
                          std::optional<std::uint64_t> fill) {
  check_operands(kind, k, a_low, b_low, fill);
  if (k == 0) return {0, carry_in};
  if (fill) return fill_part(k, *fill);
  const std::uint64_t mask = low_mask(k);
  switch (kind) {
    case AdderKind::Accurate: {
      const std::uint64_t s = a_low + b_low + static_cast<std::uint64_t>(carry_in);
      return {s & mask, static_cast<int>(s >> k)};
    }
    case AdderKind::Trunc: return {0, 0};
    case AdderKind::Median: return {mask, 0};
    case AdderKind::LOA: return {a_low | b_low, static_cast<int>((a_low & b_low) >> (k - 1))};
    case AdderKind::AMA5: return {b_low, static_cast<int>(a_low >> (k - 1))};
    case AdderKind::ETA1: {
      const std::uint64_t both = a_low & b_low;
      if (both == 0) return {a_low ^ b_low, 0};
      const int top = std::bit_width(both) - 1;
      const std::uint64_t ones = low_mask(top + 1);
      return {((a_low ^ b_low) & ~ones) | ones, 0};
    }
    case AdderKind::AMA1:
    case AdderKind::AMA2: break;
  }
  return eval_lower_part_serial(kind, k, a_low, b_low, carry_in);
}

std::int64_t approx_add(AdderKind kind, int k, std::int64_t a, std::int64_t b, int carry_in,
                        std::optional<std::uint64_t> fill) {
  if (k == 0 || kind == AdderKind::Accurate) return a + b + carry_in;
  const std::uint64_t mask = low_mask(k);
  const auto low = eval_lower_part(kind, k, static_cast<std::uint64_t>(a) & mask, static_cast<std::uint64_t>(b) & mask,
                                   carry_in, fill);
  const std::int64_t high = (a >> k) + (b >> k) + low.carry;
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(high) << k) | static_cast<std::int64_t>(low.sum);
}

std::int64_t approx_add_checked(AdderKind kind, int k, std::int64_t a, std::int64_t b, int width, int carry_in,
                                std::optional<std::uint64_t> fill) {
  const auto r = approx_add(kind, k, a, b, carry_in, fill);
  const std::int64_t lim = std::int64_t{1} << (width - 1);
  if (r < -lim || r >= lim) {
    throw Error(ErrorCode::Overflow, "adder result " + std::to_string(r) + " exceeds " + std::to_string(width) + " bits");
  }
  return r;
}

}  // namespace apx
