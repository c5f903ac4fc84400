#pragma once

// Model file ("NLNN", version 1), little-endian, CRC32 trailer:
//
//   magic "NLNN" | u32 version | u32 network count
//   per network:
//     string name | u64 seed | u32 input frames | u32 input length
//     u32 layer count | per layer: u8 kind + kind-specific fields
//     u32 tensor count | per tensor: string name | u32 rank | u32 dims[rank] | f64 values
//   u32 metadata count | per entry: string key | string value
//   u32 crc32 of everything above
//
// Strings are u32 length + bytes.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nldd/binary_io.hpp"
#include "nldd/nn/network.hpp"

namespace nldd::nn {

inline constexpr std::uint32_t kModelVersion = 1;

struct ModelFile {
  std::vector<Network> networks;
  std::map<std::string, std::string> metadata;

  const Network& network(const std::string& name) const {
    for (const auto& n : networks)
      if (n.name() == name) return n;
    throw FormatError("model file has no network named \"" + name + "\"");
  }
};

namespace detail {

enum class LayerKind : std::uint8_t { conv = 0, dense = 1, pool = 2, dropout = 3, reshape = 4 };

inline void write_spec(binary::Writer& w, const LayerSpec& spec) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConvSpec>) {
          w.u8(static_cast<std::uint8_t>(LayerKind::conv));
          w.u32(static_cast<std::uint32_t>(s.kernel));
          w.u32(static_cast<std::uint32_t>(s.filters));
          w.u32(static_cast<std::uint32_t>(s.stride));
          w.u8(s.transposed ? 1 : 0);
          w.u8(static_cast<std::uint8_t>(s.activation));
          w.f64(s.slope);
        } else if constexpr (std::is_same_v<T, DenseSpec>) {
          w.u8(static_cast<std::uint8_t>(LayerKind::dense));
          w.u32(static_cast<std::uint32_t>(s.units));
          w.u32(static_cast<std::uint32_t>(s.inputs));
          w.u8(static_cast<std::uint8_t>(s.activation));
          w.f64(s.slope);
        } else if constexpr (std::is_same_v<T, PoolSpec>) {
          w.u8(static_cast<std::uint8_t>(LayerKind::pool));
          w.u32(static_cast<std::uint32_t>(s.width));
        } else if constexpr (std::is_same_v<T, DropoutSpec>) {
          w.u8(static_cast<std::uint8_t>(LayerKind::dropout));
          w.f64(s.p);
        } else {
          w.u8(static_cast<std::uint8_t>(LayerKind::reshape));
          w.u32(static_cast<std::uint32_t>(s.frames));
          w.u32(static_cast<std::uint32_t>(s.length));
        }
      },
      spec);
}

inline Activation read_activation(binary::Reader& r) {
  const auto a = r.u8();
  if (a > static_cast<std::uint8_t>(Activation::sigmoid)) throw FormatError("unknown activation tag in " + r.path());
  return static_cast<Activation>(a);
}

inline LayerSpec read_spec(binary::Reader& r) {
  const auto kind = r.u8();
  switch (static_cast<LayerKind>(kind)) {
    case LayerKind::conv: {
      ConvSpec s;
      s.kernel = r.u32();
      s.filters = r.u32();
      s.stride = r.u32();
      s.transposed = r.u8() != 0;
      s.activation = read_activation(r);
      s.slope = r.f64();
      return s;
    }
    case LayerKind::dense: {
      DenseSpec s;
      s.units = r.u32();
      s.inputs = r.u32();
      s.activation = read_activation(r);
      s.slope = r.f64();
      return s;
    }
    case LayerKind::pool: return PoolSpec{r.u32()};
    case LayerKind::dropout: return DropoutSpec{r.f64()};
    case LayerKind::reshape: {
      ReshapeSpec s;
      s.frames = r.u32();
      s.length = r.u32();
      return s;
    }
  }
  throw FormatError("unknown layer kind in " + r.path());
}

}  // namespace detail

inline void save_model(const std::filesystem::path& path, const std::vector<const Network*>& networks,
                       const std::map<std::string, std::string>& metadata = {}) {
  binary::Writer w;
  w.bytes("NLNN");
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(networks.size()));
  for (const Network* cn : networks) {
    Network& n = const_cast<Network&>(*cn);
    w.string(n.name());
    w.u64(n.seed());
    w.u32(static_cast<std::uint32_t>(n.input_shape().frames));
    w.u32(static_cast<std::uint32_t>(n.input_shape().length));
    const auto specs = n.specs();
    w.u32(static_cast<std::uint32_t>(specs.size()));
    for (const auto& s : specs) detail::write_spec(w, s);
    const auto params = n.params();
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (const Param* p : params) {
      w.string(p->name);
      w.u32(static_cast<std::uint32_t>(p->shape.size()));
      for (auto d : p->shape) w.u32(static_cast<std::uint32_t>(d));
      w.f64s(p->value);
    }
  }
  w.u32(static_cast<std::uint32_t>(metadata.size()));
  for (const auto& [k, v] : metadata) {
    w.string(k);
    w.string(v);
  }
  w.finish(path);
}

inline ModelFile load_model(const std::filesystem::path& path) {
  binary::Reader r(path, "NLNN");
  const auto version = r.u32();
  if (version != kModelVersion)
    throw VersionError("unsupported model version " + std::to_string(version) + " in " + path.string());
  ModelFile out;
  const auto count = r.u32();
  if (count > 64) throw FormatError("implausible network count in " + path.string());
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.string();
    const std::uint64_t seed = r.u64();
    Shape in;
    in.frames = r.u32();
    in.length = r.u32();
    const auto n_layers = r.u32();
    if (n_layers > r.remaining()) throw TruncationError("file truncated: " + path.string());
    std::vector<LayerSpec> specs;
    for (std::uint32_t l = 0; l < n_layers; ++l) specs.push_back(detail::read_spec(r));
    Network net;
    try {
      net = Network(in, specs, seed, name);
    } catch (const ContractError& e) {
      throw FormatError(std::string("inconsistent layer table: ") + e.what());
    }
    auto params = net.params();
    const auto n_tensors = r.u32();
    if (n_tensors != params.size()) throw FormatError("tensor count does not match layer table in " + path.string());
    for (Param* p : params) {
      const std::string tname = r.string();
      const auto rank = r.u32();
      std::vector<std::size_t> shape;
      for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(r.u32());
      if (tname != p->name || shape != p->shape)
        throw FormatError("tensor \"" + tname + "\" does not match layer table in " + path.string());
      p->value = r.f64s(p->value.size());
    }
    out.networks.push_back(std::move(net));
  }
  const auto n_meta = r.u32();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.string();
    out.metadata[k] = r.string();
  }
  r.finish();
  return out;
}

}  // namespace nldd::nn
