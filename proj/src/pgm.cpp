#include "apx/pgm.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "apx/error.hpp"

namespace apx {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::string& b) : b_(b) {}

  long next_int() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) ++pos_;
    if (start == pos_ || pos_ - start > 9) throw Error(ErrorCode::Parse, "malformed PGM header");
    return std::stol(b_.substr(start, pos_ - start));
  }
  std::size_t pos() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(b_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& b_;
  std::size_t pos_ = 2;
};

}  // namespace

GrayImage parse_pgm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw Error(ErrorCode::Parse, "not a PGM file (expected P2 or P5)");
  }
  const bool binary = bytes[1] == '5';
  HeaderReader hr(bytes);
  GrayImage img;
  img.width = static_cast<int>(hr.next_int());
  img.height = static_cast<int>(hr.next_int());
  const long maxval = hr.next_int();
  if (img.width <= 0 || img.height <= 0) throw Error(ErrorCode::Parse, "PGM dimensions must be positive");
  if (maxval != 255) throw Error(ErrorCode::InvalidArgument, "unsupported PGM depth: maxval " + std::to_string(maxval) + ", expected 255");
  const std::size_t count = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.reserve(count);
  if (binary) {
    std::size_t p = hr.pos();
    if (p >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[p]))) throw Error(ErrorCode::Parse, "malformed PGM header");
    ++p;
    if (bytes.size() - p < count) throw Error(ErrorCode::Parse, "PGM pixel data truncated");
    for (std::size_t i = 0; i < count; ++i) img.pixels.push_back(static_cast<std::uint8_t>(bytes[p + i]));
  } else {
    std::istringstream rest(bytes.substr(hr.pos()));
    for (std::size_t i = 0; i < count; ++i) {
      long v;
      if (!(rest >> v)) throw Error(ErrorCode::Parse, "PGM pixel data truncated");
      if (v < 0 || v > 255) throw Error(ErrorCode::Parse, "PGM pixel value out of range");
      img.pixels.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return img;
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pgm(ss.str());
}

std::vector<std::int64_t> pgm_samples(const GrayImage& image, int frac_bits) {
  std::vector<std::int64_t> out;
  out.reserve(image.pixels.size());
  for (auto p : image.pixels) {
    out.push_back(frac_bits >= 8 ? static_cast<std::int64_t>(p) << (frac_bits - 8)
                                 : static_cast<std::int64_t>(p) >> (8 - frac_bits));
  }
  return out;
}

}  // namespace apx
