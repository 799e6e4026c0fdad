#include "amod/nn/binary_io.hpp"

#include <bit>

#include "amod/common.hpp"

namespace amod::nn {
namespace {

// Sanity limit on length prefixes so a corrupt file cannot request
// gigabytes.
constexpr std::uint64_t kMaxLength = std::uint64_t{1} << 32;

template <typename U>
void put_le(std::ostream& out, U v) {
  unsigned char buf[sizeof(U)];
  for (std::size_t k = 0; k < sizeof(U); ++k) buf[k] = static_cast<unsigned char>(v >> (8 * k));
  out.write(reinterpret_cast<const char*>(buf), sizeof buf);
}

}  // namespace

void BinaryWriter::bytes(const void* data, std::size_t n) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out_) throw IoError("checkpoint write failed");
}

void BinaryWriter::u32(std::uint32_t v) {
  put_le(out_, v);
  if (!out_) throw IoError("checkpoint write failed");
}

void BinaryWriter::u64(std::uint64_t v) {
  put_le(out_, v);
  if (!out_) throw IoError("checkpoint write failed");
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(const std::string& s) {
  u64(s.size());
  bytes(s.data(), s.size());
}

void BinaryWriter::vec(const Eigen::VectorXd& v) {
  u64(static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index k = 0; k < v.size(); ++k) f64(v[k]);
}

void BinaryReader::bytes(void* data, std::size_t n) {
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (in_.gcount() != static_cast<std::streamsize>(n)) throw IoError("checkpoint truncated");
}

std::uint32_t BinaryReader::u32() {
  unsigned char buf[4];
  bytes(buf, 4);
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | buf[k];
  return v;
}

std::uint64_t BinaryReader::u64() {
  unsigned char buf[8];
  bytes(buf, 8);
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | buf[k];
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
  const std::uint64_t n = u64();
  if (n > kMaxLength) throw IoError("checkpoint string length out of range");
  std::string s(n, '\0');
  bytes(s.data(), n);
  return s;
}

Eigen::VectorXd BinaryReader::vec() {
  const std::uint64_t n = u64();
  if (n > kMaxLength) throw IoError("checkpoint vector length out of range");
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = f64();
  return v;
}

}  // namespace amod::nn
