#include "rbfv/persistence.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace rbfv {

namespace {

constexpr char kMagic[8] = {'R', 'B', 'F', 'V', 'A', 'R', 'C', '\x01'};

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

template <typename T>
void append_pod(std::vector<char>& out, const T& v) {
  const char* p = reinterpret_cast<const char*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("archive truncated");
  return v;
}

}  // namespace

std::uint32_t crc32(const char* data, std::size_t size) {
  static const auto table = make_crc_table();
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < size; ++i)
    c = table[(c ^ static_cast<unsigned char>(data[i])) & 0xFFu] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void Archive::put_matrix(const std::string& name, const Matrix& m) {
  Block b;
  b.type = BlockType::Float64;
  b.dims = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  b.data.resize(sizeof(double) * m.size());
  std::memcpy(b.data.data(), m.data(), b.data.size());
  blocks_[name] = std::move(b);
}

void Archive::put_vector(const std::string& name, const Vector& v) {
  Block b;
  b.type = BlockType::Float64;
  b.dims = {static_cast<std::uint64_t>(v.size())};
  b.data.resize(sizeof(double) * v.size());
  std::memcpy(b.data.data(), v.data(), b.data.size());
  blocks_[name] = std::move(b);
}

void Archive::put_scalar(const std::string& name, double v) {
  put_vector(name, Vector::Constant(1, v));
}

void Archive::put_int(const std::string& name, std::int64_t v) { put_ints(name, {v}); }

void Archive::put_ints(const std::string& name, const std::vector<std::int64_t>& v) {
  Block b;
  b.type = BlockType::Int64;
  b.dims = {static_cast<std::uint64_t>(v.size())};
  b.data.resize(sizeof(std::int64_t) * v.size());
  std::memcpy(b.data.data(), v.data(), b.data.size());
  blocks_[name] = std::move(b);
}

void Archive::put_string(const std::string& name, const std::string& v) {
  Block b;
  b.type = BlockType::Bytes;
  b.dims = {v.size()};
  b.data.assign(v.begin(), v.end());
  blocks_[name] = std::move(b);
}

void Archive::put_sparse(const std::string& name, const SparseMatrix& m) {
  std::vector<std::int64_t> rows, cols;
  Vector vals(m.nonZeros());
  Eigen::Index k = 0;
  for (int outer = 0; outer < m.outerSize(); ++outer) {
    for (SparseMatrix::InnerIterator it(m, outer); it; ++it) {
      rows.push_back(it.row());
      cols.push_back(it.col());
      vals[k++] = it.value();
    }
  }
  put_ints(name + "/shape", {m.rows(), m.cols()});
  put_ints(name + "/rows", rows);
  put_ints(name + "/cols", cols);
  put_vector(name + "/vals", vals);
}

const Archive::Block& Archive::at(const std::string& name) const {
  auto it = blocks_.find(name);
  if (it == blocks_.end()) throw IoError("archive block '" + name + "' not found");
  return it->second;
}

Matrix Archive::get_matrix(const std::string& name) const {
  const Block& b = at(name);
  if (b.type != BlockType::Float64 || b.dims.size() != 2)
    throw IoError("block '" + name + "' is not a matrix");
  Matrix m(b.dims[0], b.dims[1]);
  std::memcpy(m.data(), b.data.data(), b.data.size());
  return m;
}

Vector Archive::get_vector(const std::string& name) const {
  const Block& b = at(name);
  if (b.type != BlockType::Float64 || b.dims.size() != 1)
    throw IoError("block '" + name + "' is not a vector");
  Vector v(b.dims[0]);
  std::memcpy(v.data(), b.data.data(), b.data.size());
  return v;
}

double Archive::get_scalar(const std::string& name) const {
  Vector v = get_vector(name);
  if (v.size() != 1) throw IoError("block '" + name + "' is not a scalar");
  return v[0];
}

std::int64_t Archive::get_int(const std::string& name) const {
  auto v = get_ints(name);
  if (v.size() != 1) throw IoError("block '" + name + "' is not a single integer");
  return v[0];
}

std::vector<std::int64_t> Archive::get_ints(const std::string& name) const {
  const Block& b = at(name);
  if (b.type != BlockType::Int64)
    throw IoError("block '" + name + "' is not an integer array");
  std::vector<std::int64_t> v(b.dims.empty() ? 0 : b.dims[0]);
  std::memcpy(v.data(), b.data.data(), b.data.size());
  return v;
}

std::string Archive::get_string(const std::string& name) const {
  const Block& b = at(name);
  if (b.type != BlockType::Bytes) throw IoError("block '" + name + "' is not a string");
  return std::string(b.data.begin(), b.data.end());
}

SparseMatrix Archive::get_sparse(const std::string& name) const {
  auto shape = get_ints(name + "/shape");
  auto rows = get_ints(name + "/rows");
  auto cols = get_ints(name + "/cols");
  Vector vals = get_vector(name + "/vals");
  SparseMatrix m(shape[0], shape[1]);
  std::vector<Triplet> triplets;
  triplets.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    triplets.emplace_back(static_cast<int>(rows[i]), static_cast<int>(cols[i]), vals[i]);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

void Archive::save(const std::string& path) const {
  // Directory first (fixed-size once names are known), then payloads.
  std::vector<char> dir;
  std::uint64_t payload_offset = 0;
  std::vector<const Block*> order;
  for (const auto& [name, block] : blocks_) {
    append_pod(dir, static_cast<std::uint32_t>(name.size()));
    dir.insert(dir.end(), name.begin(), name.end());
    append_pod(dir, static_cast<std::uint8_t>(block.type));
    append_pod(dir, static_cast<std::uint32_t>(block.dims.size()));
    for (auto d : block.dims) append_pod(dir, d);
    append_pod(dir, payload_offset);
    append_pod(dir, static_cast<std::uint64_t>(block.data.size()));
    append_pod(dir, crc32(block.data.data(), block.data.size()));
    payload_offset += block.data.size();
    order.push_back(&block);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  std::uint32_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  std::uint32_t count = static_cast<std::uint32_t>(blocks_.size());
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  std::uint64_t dir_size = dir.size();
  out.write(reinterpret_cast<const char*>(&dir_size), sizeof(dir_size));
  out.write(dir.data(), static_cast<std::streamsize>(dir.size()));
  for (const Block* b : order)
    out.write(b->data.data(), static_cast<std::streamsize>(b->data.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

Archive Archive::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("'" + path + "' is not a model archive");
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion)
    throw IoError("archive version " + std::to_string(version) + " is not supported");
  const auto count = read_pod<std::uint32_t>(in);
  const auto dir_size = read_pod<std::uint64_t>(in);

  struct Entry {
    std::string name;
    Block block;
    std::uint64_t offset = 0;
    std::uint64_t nbytes = 0;
    std::uint32_t crc = 0;
  };
  std::vector<Entry> entries(count);
  for (auto& e : entries) {
    const auto name_len = read_pod<std::uint32_t>(in);
    e.name.resize(name_len);
    in.read(e.name.data(), name_len);
    e.block.type = static_cast<BlockType>(read_pod<std::uint8_t>(in));
    const auto ndim = read_pod<std::uint32_t>(in);
    e.block.dims.resize(ndim);
    for (auto& d : e.block.dims) d = read_pod<std::uint64_t>(in);
    e.offset = read_pod<std::uint64_t>(in);
    e.nbytes = read_pod<std::uint64_t>(in);
    e.crc = read_pod<std::uint32_t>(in);
    if (!in) throw IoError("archive directory truncated");
  }
  (void)dir_size;

  Archive archive;
  const std::streampos payload_start = in.tellg();
  for (auto& e : entries) {
    in.seekg(payload_start + static_cast<std::streamoff>(e.offset));
    e.block.data.resize(e.nbytes);
    in.read(e.block.data.data(), static_cast<std::streamsize>(e.nbytes));
    if (!in) throw IoError("archive payload truncated in block '" + e.name + "'");
    if (crc32(e.block.data.data(), e.block.data.size()) != e.crc)
      throw IoError("checksum mismatch in block '" + e.name + "'");
    archive.blocks_[e.name] = std::move(e.block);
  }
  return archive;
}

}  // namespace rbfv
