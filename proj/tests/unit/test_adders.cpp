#include "apx/adders.hpp"
#include "apx/error.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace apx;

TEST_CASE("truth tables") {
  const auto& ama2 = truth_table(AdderKind::AMA2);
  const auto& ama5 = truth_table(AdderKind::AMA5);
  const auto& acc = truth_table(AdderKind::Accurate);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        CHECK(ama2.f(a, b, c) == 1 - ama2.g(a, b, c));
        CHECK(ama2.g(a, b, c) == ((a + b + c) >= 2));
        CHECK(ama5.f(a, b, c) == b);
        CHECK(ama5.g(a, b, c) == a);
        CHECK(acc.f(a, b, c) == ((a + b + c) & 1));
        CHECK(truth_table(AdderKind::Trunc).f(a, b, c) == 0);
        CHECK(truth_table(AdderKind::Median).f(a, b, c) == 1);
      }
  CHECK_THROWS_AS(truth_table(AdderKind::ETA1), Error);
}

TEST_CASE("lower part examples") {
  auto loa = eval_lower_part(AdderKind::LOA, 4, 0b1010, 0b0110);
  CHECK(loa.sum == 0b1110);
  CHECK(loa.carry == 0);
  auto eta = eval_lower_part(AdderKind::ETA1, 4, 0b1011, 0b0110);
  CHECK(eta.sum == 15);
  CHECK(eta.carry == 0);
  CHECK(eval_lower_part(AdderKind::Trunc, 5, 31, 17).sum == 0);
  CHECK(approx_add(AdderKind::Median, 3, 0, 0) == 7);
  CHECK(approx_add(AdderKind::AMA5, 4, 0, 13) == 13);
  CHECK_THROWS_AS(eval_lower_part(AdderKind::LOA, 4, 16, 0), Error);
  CHECK_THROWS_AS(eval_lower_part(AdderKind::LOA, 4, 1, 0, 0, 3), Error);
}

TEST_CASE("fast paths match the serial ripple and the oracle") {
  for (auto kind : kAllAdderKinds) {
    for (int k = 0; k <= 6; ++k) {
      const std::uint64_t n = std::uint64_t{1} << k;
      for (int cin = 0; cin < 2; ++cin)
        for (std::uint64_t a = 0; a < n; ++a)
          for (std::uint64_t b = 0; b < n; ++b) {
            const auto f = eval_lower_part(kind, k, a, b, cin);
            const auto s = eval_lower_part_serial(kind, k, a, b, cin);
            const auto o = oracle::lower_part(kind, k, a, b, cin);
            REQUIRE(f.sum == s.sum);
            REQUIRE(f.carry == s.carry);
            REQUIRE(f.sum == o.sum);
            REQUIRE(f.carry == o.carry);
          }
    }
  }
}

TEST_CASE("approx_add on signed words") {
  for (auto kind : kAllAdderKinds) {
    CHECK(approx_add(kind, 0, -37, 91) == 54);
    CHECK(approx_add(kind, 0, -37, 91, 1) == 55);
  }
  for (int k = 0; k <= 8; ++k) CHECK(approx_add(AdderKind::Accurate, k, -1000, 333) == -667);
  // Upper part is exact: error never exceeds 2^(k+1).
  for (auto kind : kAllAdderKinds)
    for (std::int64_t a = -64; a < 64; a += 7)
      for (std::int64_t b = -64; b < 64; b += 5) {
        const auto r = approx_add(kind, 4, a, b);
        CHECK(std::abs(a + b - r) < 32);
        const auto d = approx_sub(kind, 4, a, b);
        CHECK(std::abs(a - b - d) < 32);
      }
  CHECK(approx_sub(AdderKind::Accurate, 5, 10, 30) == -20);
  CHECK_THROWS_AS(approx_add_checked(AdderKind::Accurate, 0, 100, 100, 8), Error);
  CHECK(approx_add_checked(AdderKind::Accurate, 0, 100, 27, 8) == 127);
}

TEST_CASE("median fill override") {
  const auto lp = eval_lower_part(AdderKind::Median, 4, 3, 9, 0, 31);
  CHECK(lp.sum == 15);
  CHECK(lp.carry == 1);
  CHECK(approx_add(AdderKind::Median, 4, 0, 0, 0, 31) == 31);
}

TEST_CASE("adder kind names") {
  for (auto k : kAllAdderKinds) CHECK(parse_adder_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_adder_kind("ama9"), Error);
}
