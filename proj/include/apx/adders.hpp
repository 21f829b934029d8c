#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace apx {

/// Low-power approximate adders with a k-bit approximate lower part and an
/// exact upper part.
enum class AdderKind { Accurate, Trunc, Median, LOA, AMA1, AMA2, AMA5, ETA1 };

inline constexpr std::array<AdderKind, 8> kAllAdderKinds = {
    AdderKind::Accurate, AdderKind::Trunc, AdderKind::Median, AdderKind::LOA,
    AdderKind::AMA1,     AdderKind::AMA2,  AdderKind::AMA5,   AdderKind::ETA1};

/// CLI spelling: accurate|trunc|median|loa|ama1|ama2|ama5|eta1.
std::string_view to_string(AdderKind kind);
AdderKind parse_adder_kind(std::string_view name);

/// Per-bit cell of the lower part: s = f(a, b, c_in), c_out = g(a, b, c_in).
/// Tables are indexed by (a << 2) | (b << 1) | c.
struct BitRule {
  std::array<std::uint8_t, 8> sum{};
  std::array<std::uint8_t, 8> carry{};

  static constexpr int index(int a, int b, int c) { return (a << 2) | (b << 1) | c; }
  int f(int a, int b, int c) const { return sum[index(a, b, c)]; }
  int g(int a, int b, int c) const { return carry[index(a, b, c)]; }
};

/// Every kind except ETA1, whose lower part is a scan rather than a ripple.
constexpr bool is_table_based(AdderKind kind) { return kind != AdderKind::ETA1; }

/// Throws for ETA1.
const BitRule& truth_table(AdderKind kind);

struct LowerPart {
  std::uint64_t sum = 0;  ///< k-bit approximate sum
  int carry = 0;          ///< carry into the accurate part
};

/// Lower k bits of an approximate addition. `carry_in` enters the ripple at
/// bit 0 (it is 1 for a subtractor computing a + ~b + 1; kinds without a
/// carry chain drop it). `fill` replaces the Median sum: its low k bits become
/// the sum and bit k the carry, so a fill of 2^(k+1)-1 means "all ones plus
/// carry".
LowerPart eval_lower_part(AdderKind kind, int k, std::uint64_t a_low, std::uint64_t b_low, int carry_in = 0,
                          std::optional<std::uint64_t> fill = std::nullopt);

/// Same as eval_lower_part but by explicit bit-serial ripple of the truth
/// table or the ETA-I scan; used as the reference for the fast paths.
LowerPart eval_lower_part_serial(AdderKind kind, int k, std::uint64_t a_low, std::uint64_t b_low, int carry_in = 0,
                                 std::optional<std::uint64_t> fill = std::nullopt);

/// Two's-complement approximate a + b + carry_in on the 2^-N integer grid:
/// exact upper part (bits >= k) fed by the lower part's carry.
std::int64_t approx_add(AdderKind kind, int k, std::int64_t a, std::int64_t b, int carry_in = 0,
                        std::optional<std::uint64_t> fill = std::nullopt);

/// a - b realized as a + ~b with carry-in 1 through the same lower part.
inline std::int64_t approx_sub(AdderKind kind, int k, std::int64_t a, std::int64_t b,
                               std::optional<std::uint64_t> fill = std::nullopt) {
  return approx_add(kind, k, a, ~b, 1, fill);
}

/// approx_add with a range check: throws apx::Error (Overflow) when the
/// result does not fit `width` two's-complement bits.
std::int64_t approx_add_checked(AdderKind kind, int k, std::int64_t a, std::int64_t b, int width, int carry_in = 0,
                                std::optional<std::uint64_t> fill = std::nullopt);

}  // namespace apx
