#ifndef AMOD_NN_BINARY_IO_HPP_
#define AMOD_NN_BINARY_IO_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

namespace amod::nn {

// Little-endian primitives for the checkpoint container. Reads throw
// IoError on truncated input.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v);
  void str(const std::string& s);  // u64 length + raw bytes
  void vec(const Eigen::VectorXd& v);  // u64 length + f64 values

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  void bytes(void* data, std::size_t n);
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64();
  std::string str();
  Eigen::VectorXd vec();

 private:
  std::istream& in_;
};

}  // namespace amod::nn

#endif  // AMOD_NN_BINARY_IO_HPP_
