#pragma once

// Versioned binary checkpoint: name -> shape -> float32 little-endian values.
// Values round-trip through float32 by design; training state is not saved.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "tsrlab/errors.hpp"
#include "tsrlab/nn.hpp"

namespace tsrlab::nn {

inline constexpr char kCheckpointMagic[8] = {'T', 'S', 'R', 'C', 'K', 'P', 'T', '1'};

namespace detail {

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) fail(Errc::format_error, "truncated checkpoint");
  return v;
}

}  // namespace detail

inline void save_checkpoint(const ModelInstance& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_failure, "cannot write " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(m.params.size()));
  for (const auto& [name, p] : m.params) {
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(p->value.shape.size()));
    for (int d : p->value.shape) detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (double v : p->value.data) detail::write_pod<float>(out, static_cast<float>(v));
  }
  if (!out) fail(Errc::io_failure, "write failed for " + path);
}

/// Loads values into an already-constructed model; names and shapes must
/// match the model exactly, in order.
inline void load_checkpoint(ModelInstance& m, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_failure, "cannot read " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    fail(Errc::format_error, path + " is not a checkpoint");
  }
  const auto count = detail::read_pod<std::uint32_t>(in);
  if (count != m.params.size()) fail(Errc::format_error, "parameter count mismatch");
  for (auto& [name, p] : m.params) {
    const auto name_len = detail::read_pod<std::uint32_t>(in);
    std::string stored(name_len, '\0');
    in.read(stored.data(), name_len);
    if (!in || stored != name) fail(Errc::format_error, "parameter order mismatch at " + name);
    const auto ndim = detail::read_pod<std::uint32_t>(in);
    std::vector<int> shape(ndim);
    for (auto& d : shape) d = static_cast<int>(detail::read_pod<std::uint32_t>(in));
    if (shape != p->value.shape) fail(Errc::format_error, "shape mismatch at " + name);
    for (double& v : p->value.data) v = static_cast<double>(detail::read_pod<float>(in));
  }
}

}  // namespace tsrlab::nn
