#include "tidyplan/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace tidyplan {
namespace ckpt {

namespace {

constexpr char kMagic[8] = {'T', 'D', 'Y', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void write_le(std::ofstream& out, T v) {
  // x86/arm-le hosts; bytes are already little-endian in memory
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
  char buf[sizeof(T)];
  in.read(buf, sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void Checkpoint::put(const std::string& name, const std::vector<uint32_t>& dims,
                     std::vector<double> data) {
  size_t n = 1;
  for (uint32_t d : dims) n *= d;
  if (n != data.size()) throw PlanError(Err::shape_mismatch, "checkpoint section " + name);
  sections[name] = Section{dims, std::move(data)};
}

const Section& Checkpoint::get(const std::string& name) const {
  auto it = sections.find(name);
  if (it == sections.end()) throw PlanError(Err::missing_model, "checkpoint section missing: " + name);
  return it->second;
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PlanError(Err::io_error, "cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  write_le<uint32_t>(out, static_cast<uint32_t>(sections.size()));
  for (const auto& [name, sec] : sections) {
    write_le<uint32_t>(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_le<uint32_t>(out, static_cast<uint32_t>(sec.dims.size()));
    for (uint32_t d : sec.dims) write_le<uint32_t>(out, d);
    for (double v : sec.data) write_le<double>(out, v);
  }
  if (!out) throw PlanError(Err::io_error, "write failed: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PlanError(Err::io_error, "cannot read " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw PlanError(Err::io_error, "bad checkpoint header: " + path);
  Checkpoint c;
  uint32_t count = read_le<uint32_t>(in);
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t name_len = read_le<uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    uint32_t ndims = read_le<uint32_t>(in);
    Section sec;
    size_t n = 1;
    for (uint32_t d = 0; d < ndims; ++d) {
      sec.dims.push_back(read_le<uint32_t>(in));
      n *= sec.dims.back();
    }
    sec.data.resize(n);
    for (size_t k = 0; k < n; ++k) sec.data[k] = read_le<double>(in);
    if (!in) throw PlanError(Err::io_error, "truncated checkpoint: " + path);
    c.sections[name] = std::move(sec);
  }
  return c;
}

}  // namespace ckpt
}  // namespace tidyplan
