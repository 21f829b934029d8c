#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace apx {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  ///< row-major
};

/// 8-bit PGM, ASCII (P2) or binary (P5), maxval 255.
GrayImage read_pgm(const std::string& path);
GrayImage parse_pgm(const std::string& bytes);

/// Pixels mapped to the 2^-N integer grid: pixel * 2^(N-8) (floor for N < 8).
std::vector<std::int64_t> pgm_samples(const GrayImage& image, int frac_bits);

}  // namespace apx
