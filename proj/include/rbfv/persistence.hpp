#pragma once

#include "rbfv/types.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace rbfv {

/// Versioned little-endian binary container of named blocks. Doubles are
/// stored as raw IEEE-754 payloads so save/load round-trips are bitwise; each
/// block carries a CRC32 verified on load.
class Archive {
 public:
  enum class BlockType : std::uint8_t { Float64 = 0, Int64 = 1, Bytes = 2 };

  struct Block {
    BlockType type = BlockType::Bytes;
    std::vector<std::uint64_t> dims;
    std::vector<char> data;
  };

  static constexpr std::uint32_t kVersion = 1;

  void put_matrix(const std::string& name, const Matrix& m);
  void put_vector(const std::string& name, const Vector& v);
  void put_scalar(const std::string& name, double v);
  void put_int(const std::string& name, std::int64_t v);
  void put_ints(const std::string& name, const std::vector<std::int64_t>& v);
  void put_string(const std::string& name, const std::string& v);
  void put_sparse(const std::string& name, const SparseMatrix& m);

  bool has(const std::string& name) const { return blocks_.count(name) != 0; }
  Matrix get_matrix(const std::string& name) const;
  Vector get_vector(const std::string& name) const;
  double get_scalar(const std::string& name) const;
  std::int64_t get_int(const std::string& name) const;
  std::vector<std::int64_t> get_ints(const std::string& name) const;
  std::string get_string(const std::string& name) const;
  SparseMatrix get_sparse(const std::string& name) const;

  void save(const std::string& path) const;
  static Archive load(const std::string& path);

  std::size_t block_count() const { return blocks_.size(); }

 private:
  const Block& at(const std::string& name) const;
  std::map<std::string, Block> blocks_;  // name-ordered for deterministic bytes
};

std::uint32_t crc32(const char* data, std::size_t size);

}  // namespace rbfv
