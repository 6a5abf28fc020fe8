#include "cantor/word.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace cantor {

BinaryWord BinaryWord::from_string(std::string_view s) {
  std::vector<std::uint8_t> bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c == '0') {
      bits.push_back(0);
    } else if (c == '1') {
      bits.push_back(1);
    } else {
      throw std::invalid_argument("binary word may contain only '0'/'1', got '" +
                                  std::string(1, c) + "'");
    }
  }
  return BinaryWord(std::move(bits));
}

std::string BinaryWord::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

BinaryWord BinaryWord::operator+(const BinaryWord& o) const {
  std::vector<std::uint8_t> bits = bits_;
  bits.insert(bits.end(), o.bits_.begin(), o.bits_.end());
  return BinaryWord(std::move(bits));
}

bool matches_at(BitSpan x, BitSpan u, std::size_t pos) {
  if (pos + u.size() > x.size()) return false;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (x[pos + i] != u[i]) return false;
  }
  return true;
}

void write_packed(std::ostream& out, BitSpan bits) {
  const std::uint64_t n = bits.size();
  char header[8];
  for (int i = 0; i < 8; ++i) header[i] = static_cast<char>((n >> (8 * i)) & 0xFF);
  out.write(header, 8);
  std::vector<char> bytes((n + 7) / 8, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (bits[i]) bytes[i >> 3] |= static_cast<char>(1 << (i & 7));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

bool read_packed(std::istream& in, BinaryWord& out) {
  char header[8];
  in.read(header, 8);
  if (in.gcount() == 0) return false;  // clean EOF between frames
  if (in.gcount() != 8) throw std::runtime_error("truncated packed frame header");
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i) {
    n |= static_cast<std::uint64_t>(static_cast<unsigned char>(header[i])) << (8 * i);
  }
  std::vector<char> bytes((n + 7) / 8);
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::uint64_t>(in.gcount()) != bytes.size()) {
    throw std::runtime_error("truncated packed frame body");
  }
  std::vector<std::uint8_t> bits(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    bits[i] = (static_cast<unsigned char>(bytes[i >> 3]) >> (i & 7)) & 1;
  }
  out = BinaryWord(std::move(bits));
  return true;
}

}  // namespace cantor
