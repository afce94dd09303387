#include "cltlab/batch_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cltlab {

namespace {

constexpr char kMagic[8] = {'C', 'L', 'T', 'L', 'A', 'B', '0', '1'};

[[noreturn]] void io_error(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint64_t get_u64(std::istream& is, const std::filesystem::path& path) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) io_error(path, "truncated header");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint32_t get_u32(std::istream& is, const std::filesystem::path& path) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) io_error(path, "truncated header");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

void write_batch_binary(const SampleBatch& batch, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) io_error(path, "cannot open for writing");
  os.write(kMagic, 8);
  put_u64(os, static_cast<std::uint64_t>(batch.dim()));
  put_u64(os, static_cast<std::uint64_t>(batch.size()));
  put_u64(os, batch.seed.seed);
  put_u64(os, batch.seed.stream_id);
  put_u64(os, static_cast<std::uint64_t>(batch.burn_in));
  put_u64(os, static_cast<std::uint64_t>(batch.thinning));
  put_u32(os, static_cast<std::uint32_t>(batch.sampler_id.size()));
  os.write(batch.sampler_id.data(), static_cast<std::streamsize>(batch.sampler_id.size()));
  const double* p = batch.data.data();
  for (Index i = 0; i < batch.data.size(); ++i) put_u64(os, std::bit_cast<std::uint64_t>(p[i]));
  if (!os) io_error(path, "write failed");
}

SampleBatch read_batch_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) io_error(path, "cannot open for reading");
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) io_error(path, "not a batch file (bad magic)");
  const auto n = static_cast<Index>(get_u64(is, path));
  const auto m = static_cast<Index>(get_u64(is, path));
  SampleBatch batch;
  batch.seed.seed = get_u64(is, path);
  batch.seed.stream_id = get_u64(is, path);
  batch.burn_in = static_cast<long>(get_u64(is, path));
  batch.thinning = static_cast<long>(get_u64(is, path));
  const std::uint32_t len = get_u32(is, path);
  batch.sampler_id.resize(len);
  if (!is.read(batch.sampler_id.data(), len)) io_error(path, "truncated sampler id");
  batch.data.resize(m, n);
  double* p = batch.data.data();
  for (Index i = 0; i < batch.data.size(); ++i) p[i] = std::bit_cast<double>(get_u64(is, path));
  return batch;
}

void write_batch_csv(const SampleBatch& batch, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) io_error(path, "cannot open for writing");
  os << "# seed=" << batch.seed.seed << " stream_id=" << batch.seed.stream_id << " burn_in=" << batch.burn_in
     << " thinning=" << batch.thinning << " sampler_id=" << batch.sampler_id << '\n';
  for (Index j = 0; j < batch.dim(); ++j) os << (j ? "," : "") << 'x' << j;
  os << '\n';
  for (Index i = 0; i < batch.size(); ++i) {
    for (Index j = 0; j < batch.dim(); ++j) os << (j ? "," : "") << format_double(batch.data(i, j));
    os << '\n';
  }
  if (!os) io_error(path, "write failed");
}

SampleBatch read_batch_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) io_error(path, "cannot open for reading");
  SampleBatch batch;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) io_error(path, "missing provenance header");
  {
    std::istringstream hs(line.substr(2));
    std::string field;
    while (hs >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = field.substr(0, eq);
      const std::string val = field.substr(eq + 1);
      if (key == "seed") batch.seed.seed = std::stoull(val);
      if (key == "stream_id") batch.seed.stream_id = std::stoull(val);
      if (key == "burn_in") batch.burn_in = std::stol(val);
      if (key == "thinning") batch.thinning = std::stol(val);
      if (key == "sampler_id") {
        // The id runs to the end of the line.
        batch.sampler_id = line.substr(line.find("sampler_id=") + 11);
        break;
      }
    }
  }
  if (!std::getline(is, line)) io_error(path, "missing column header");
  const Index n = static_cast<Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t start = 0;
    Index cols = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      double v = 0.0;
      const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (r.ec != std::errc()) io_error(path, "bad number '" + cell + "'");
      values.push_back(v);
      ++cols;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cols != n) io_error(path, "row width does not match the header");
  }
  const Index m = static_cast<Index>(values.size()) / n;
  batch.data = Eigen::Map<RowMatrix>(values.data(), m, n);
  return batch;
}

}  // namespace cltlab
