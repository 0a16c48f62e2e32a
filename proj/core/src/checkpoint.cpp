#include "kanppo/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "kanppo/errors.hpp"

namespace kanppo {

namespace {

constexpr char kMagic[4] = {'K', 'P', 'C', 'K'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& os, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

void put_u64(std::ostream& os, uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<uint64_t>(v)); }
void put_u8(std::ostream& os, uint8_t v) { os.put(static_cast<char>(v)); }

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw ConfigError("checkpoint: truncated file");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw ConfigError("checkpoint: truncated file");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

uint8_t get_u8(std::istream& is) {
  const int c = is.get();
  if (c == EOF) throw ConfigError("checkpoint: truncated file");
  return static_cast<uint8_t>(c);
}

void put_vec(std::ostream& os, const Vec& v) {
  put_u64(os, v.size());
  for (double x : v) put_f64(os, x);
}

Vec get_vec(std::istream& is) {
  const uint64_t n = get_u64(is);
  if (n > (1ull << 32)) throw ConfigError("checkpoint: implausible vector length");
  Vec v(n);
  for (auto& x : v) x = get_f64(is);
  return v;
}

void put_network(std::ostream& os, const Network& net) {
  put_u8(os, net.kind() == NetworkKind::kKan ? 1 : 0);
  put_u32(os, static_cast<uint32_t>(net.layers().size()));
  for (const auto& layer : net.layers()) {
    if (const auto* dense = dynamic_cast<const DenseLayer*>(layer.get())) {
      put_u8(os, 0);
      put_u32(os, dense->in_dim());
      put_u32(os, dense->out_dim());
      put_u8(os, dense->activation() == Activation::kTanh ? 0 : 1);
    } else if (const auto* kan = dynamic_cast<const KANLayer*>(layer.get())) {
      put_u8(os, 1);
      put_u32(os, kan->in_dim());
      put_u32(os, kan->out_dim());
      put_u32(os, kan->config().order_k);
      put_u32(os, kan->config().grid_g);
      put_f64(os, kan->config().range_min);
      put_f64(os, kan->config().range_max);
    } else {
      throw ConfigError("checkpoint: unknown layer type");
    }
  }
  put_vec(os, net.params());
}

Network get_network(std::istream& is) {
  const NetworkKind kind = get_u8(is) == 1 ? NetworkKind::kKan : NetworkKind::kMlp;
  const uint32_t n_layers = get_u32(is);
  if (n_layers == 0 || n_layers > 1024) throw ConfigError("checkpoint: bad layer count");
  std::vector<std::unique_ptr<Layer>> layers;
  for (uint32_t l = 0; l < n_layers; ++l) {
    const uint8_t type = get_u8(is);
    const int n_in = static_cast<int>(get_u32(is));
    const int n_out = static_cast<int>(get_u32(is));
    if (type == 0) {
      const Activation act = get_u8(is) == 0 ? Activation::kTanh : Activation::kIdentity;
      layers.push_back(std::make_unique<DenseLayer>(n_in, n_out, act));
    } else if (type == 1) {
      SplineConfig cfg;
      cfg.order_k = static_cast<int>(get_u32(is));
      cfg.grid_g = static_cast<int>(get_u32(is));
      cfg.range_min = get_f64(is);
      cfg.range_max = get_f64(is);
      layers.push_back(std::make_unique<KANLayer>(n_in, n_out, cfg));
    } else {
      throw ConfigError("checkpoint: unknown layer type tag");
    }
  }
  Network net = Network::from_layers(std::move(layers), kind);
  const Vec params = get_vec(is);
  if (params.size() != net.param_count()) {
    throw ConfigError("checkpoint: parameter count does not match layer shapes");
  }
  net.set_params(params);
  return net;
}

}  // namespace

void save_checkpoint(const std::string& path, const ActorCritic& ac, const RunningNorm& norm) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("checkpoint: cannot open '" + path + "' for writing");
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_network(os, ac.actor());
  put_network(os, ac.critic());
  put_vec(os, ac.log_std());
  put_u8(os, norm.enabled() ? 1 : 0);
  put_f64(os, norm.clip());
  put_f64(os, norm.count());
  put_vec(os, norm.mean());
  put_vec(os, norm.m2());
  if (!os) throw ConfigError("checkpoint: write to '" + path + "' failed");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("checkpoint: cannot open '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("checkpoint: '" + path + "' is not a checkpoint file (bad magic)");
  }
  const uint32_t version = get_u32(is);
  if (version != kVersion) {
    throw ConfigError("checkpoint: unsupported version " + std::to_string(version));
  }
  Network actor = get_network(is);
  Network critic = get_network(is);
  const Vec log_std = get_vec(is);
  ActorCritic ac(std::move(actor), std::move(critic));
  if (log_std.size() != ac.log_std().size()) {
    throw ConfigError("checkpoint: log_std length does not match actor output");
  }
  ac.log_std() = log_std;

  const bool enabled = get_u8(is) == 1;
  const double clip = get_f64(is);
  const double count = get_f64(is);
  Vec mean = get_vec(is);
  Vec m2 = get_vec(is);
  RunningNorm norm(static_cast<int>(mean.size()), enabled, clip);
  norm.restore(std::move(mean), std::move(m2), count, enabled, clip);
  return LoadedCheckpoint{std::move(ac), std::move(norm)};
}

}  // namespace kanppo
