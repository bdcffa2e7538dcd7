#include "hoi/numerics/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>

namespace hoi {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {
constexpr char kMagic[7] = {'H', 'A', 'I', 'C', 'W', 'M', '1'};
constexpr uint8_t kVersion = 1;

struct File {
  FILE* f = nullptr;
  explicit File(FILE* h) : f(h) {}
  ~File() {
    if (f) std::fclose(f);
  }
};

void write_bytes(FILE* f, const void* p, size_t n, const std::string& path) {
  check_runtime(std::fwrite(p, 1, n, f) == n, "write failed: " + path);
}
void read_bytes(FILE* f, void* p, size_t n, const std::string& path) {
  check_runtime(std::fread(p, 1, n, f) == n, "truncated checkpoint: " + path);
}
}  // namespace

void save_params(const std::string& path, const NamedTensors& params) {
  File fh(std::fopen(path.c_str(), "wb"));
  check_runtime(fh.f != nullptr, "cannot open for write: " + path);
  write_bytes(fh.f, kMagic, sizeof(kMagic), path);
  write_bytes(fh.f, &kVersion, 1, path);
  const uint64_t count = params.size();
  write_bytes(fh.f, &count, 8, path);
  for (const auto& [name, t] : params) {
    const uint32_t len = uint32_t(name.size());
    write_bytes(fh.f, &len, 4, path);
    write_bytes(fh.f, name.data(), len, path);
    const uint32_t rank = uint32_t(t.shape.size());
    write_bytes(fh.f, &rank, 4, path);
    for (int64_t d : t.shape) {
      const uint64_t du = uint64_t(d);
      write_bytes(fh.f, &du, 8, path);
    }
    write_bytes(fh.f, t.data.data(), t.data.size() * 8, path);
  }
}

NamedTensors load_params(const std::string& path) {
  File fh(std::fopen(path.c_str(), "rb"));
  check_runtime(fh.f != nullptr, "cannot open checkpoint: " + path);
  char magic[7];
  read_bytes(fh.f, magic, 7, path);
  check_runtime(std::memcmp(magic, kMagic, 7) == 0, "bad magic in checkpoint: " + path);
  uint8_t ver = 0;
  read_bytes(fh.f, &ver, 1, path);
  check_runtime(ver == kVersion, "unsupported checkpoint version in " + path);
  uint64_t count = 0;
  read_bytes(fh.f, &count, 8, path);
  NamedTensors out;
  out.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    uint32_t len = 0;
    read_bytes(fh.f, &len, 4, path);
    check_runtime(len < (1u << 20), "absurd name length in checkpoint: " + path);
    std::string name(len, '\0');
    read_bytes(fh.f, name.data(), len, path);
    uint32_t rank = 0;
    read_bytes(fh.f, &rank, 4, path);
    check_runtime(rank <= 8, "absurd rank in checkpoint: " + path);
    Tensor t;
    int64_t numel = 1;
    for (uint32_t r = 0; r < rank; ++r) {
      uint64_t d = 0;
      read_bytes(fh.f, &d, 8, path);
      t.shape.push_back(int64_t(d));
      numel *= int64_t(d);
    }
    check_runtime(numel >= 0 && numel < (int64_t(1) << 32), "absurd tensor size: " + path);
    t.data.resize(size_t(numel));
    read_bytes(fh.f, t.data.data(), size_t(numel) * 8, path);
    out.emplace_back(std::move(name), std::move(t));
  }
  return out;
}

const Tensor* find_param(const NamedTensors& params, const std::string& name) {
  for (const auto& [n, t] : params)
    if (n == name) return &t;
  return nullptr;
}

}  // namespace hoi
