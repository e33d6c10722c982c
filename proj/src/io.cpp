#include "oldb/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "oldb/transform.hpp"

namespace oldb {

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, std::size_t offset, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out[offset + i] = static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff);
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t offset) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(in[offset + i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer, bool binary) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    try {
      writer(out);
    } catch (...) {
      out.close();
      std::filesystem::remove(tmp);
      throw;
    }
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::uint8_t> encode_header(const SnapshotHeader& h) {
  std::vector<std::uint8_t> bytes(kSnapshotHeaderBytes, 0);
  std::memcpy(bytes.data(), "OLDB", 4);
  put_le<std::uint16_t>(bytes, 4, h.version);
  bytes[6] = static_cast<std::uint8_t>(h.dim);
  bytes[7] = static_cast<std::uint8_t>(h.rank);
  put_le<std::uint32_t>(bytes, 8, static_cast<std::uint32_t>(h.points));
  put_le<double>(bytes, 12, h.time);
  return bytes;
}

SnapshotHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kSnapshotHeaderBytes) throw IoError("truncated snapshot header");
  if (std::memcmp(bytes.data(), "OLDB", 4) != 0) throw IoError("bad snapshot magic");
  SnapshotHeader h;
  h.version = get_le<std::uint16_t>(bytes, 4);
  if (h.version != kSnapshotVersion)
    throw IoError("unsupported snapshot version " + std::to_string(h.version));
  h.dim = bytes[6];
  const int rank = bytes[7];
  if (rank > 3) throw IoError("bad rank code " + std::to_string(rank));
  h.rank = static_cast<Rank>(rank);
  h.points = static_cast<int>(get_le<std::uint32_t>(bytes, 8));
  h.time = get_le<double>(bytes, 12);
  return h;
}

void write_snapshot(const std::filesystem::path& path, std::span<const Field> fields, double time) {
  atomic_write(
      path,
      [&](std::ostream& out) {
        for (const Field& f : fields) {
          SnapshotHeader h;
          h.dim = f.dim();
          h.rank = f.rank();
          h.points = f.grid().points();
          h.time = time;
          const auto header = encode_header(h);
          out.write(reinterpret_cast<const char*>(header.data()),
                    static_cast<std::streamsize>(header.size()));
          const PhysicalField phys = inverse_transform(f);
          std::vector<std::uint8_t> buf(8 * static_cast<std::size_t>(phys.samples().size()));
          std::size_t off = 0;
          for (int c = 0; c < phys.components(); ++c)
            for (Index p = 0; p < phys.samples().rows(); ++p, off += 8)
              put_le<double>(buf, off, phys.samples()(p, c));
          out.write(reinterpret_cast<const char*>(buf.data()),
                    static_cast<std::streamsize>(buf.size()));
        }
      },
      true);
}

SnapshotContents read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  SnapshotContents contents;
  std::size_t off = 0;
  GridPtr grid;
  while (off < bytes.size()) {
    const std::span<const std::uint8_t> view(bytes.data() + off, bytes.size() - off);
    const SnapshotHeader h = decode_header(view);
    if (!grid || grid->dim() != h.dim || grid->points() != h.points) grid = make_grid(h.dim, h.points);
    contents.time = h.time;
    off += kSnapshotHeaderBytes;
    const int comps = component_count(h.rank, h.dim);
    const std::size_t count = static_cast<std::size_t>(grid->size()) * comps;
    if (bytes.size() - off < 8 * count) throw IoError("truncated snapshot payload");
    PhysicalField phys(grid, h.rank);
    for (int c = 0; c < comps; ++c)
      for (Index p = 0; p < grid->size(); ++p, off += 8)
        phys.samples()(p, c) = get_le<double>(std::span<const std::uint8_t>(bytes), off);
    contents.fields.push_back(transform(phys));
  }
  if (contents.fields.empty()) throw IoError("snapshot " + path.string() + " holds no records");
  return contents;
}

}  // namespace oldb
