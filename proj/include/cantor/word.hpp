#ifndef CANTOR_WORD_HPP
#define CANTOR_WORD_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cantor {

// View over a stretch of bits; the argument type of every cylinder quantity.
using BitSpan = std::span<const std::uint8_t>;

// A finite binary word. Bits are stored one per byte with values 0/1; the
// empty word is valid and denotes the whole space's cylinder.
class BinaryWord {
 public:
  BinaryWord() = default;
  explicit BinaryWord(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

  // Parses a string of '0'/'1' characters; throws std::invalid_argument on
  // anything else.
  static BinaryWord from_string(std::string_view s);
  std::string to_string() const;

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }

  void push_back(std::uint8_t bit) { bits_.push_back(bit); }
  void reserve(std::size_t n) { bits_.reserve(n); }

  BitSpan span() const { return BitSpan(bits_); }
  BitSpan prefix(std::size_t n) const { return span().subspan(0, n); }
  BitSpan subspan(std::size_t pos, std::size_t len) const {
    return span().subspan(pos, len);
  }
  operator BitSpan() const { return span(); }

  BinaryWord operator+(const BinaryWord& o) const;

  bool operator==(const BinaryWord&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// True when u occurs in x starting at position pos.
bool matches_at(BitSpan x, BitSpan u, std::size_t pos);

// Packed frame: 8-byte little-endian bit count, then ceil(n/8) bytes with
// bit i stored at byte i/8, position i%8 (LSB first).
void write_packed(std::ostream& out, BitSpan bits);
// Reads one frame; returns false on clean EOF, throws on a truncated frame.
bool read_packed(std::istream& in, BinaryWord& out);

}  // namespace cantor

#endif
