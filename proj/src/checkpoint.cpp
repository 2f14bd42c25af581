#include "cogman/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "cogman/errors.hpp"

namespace cogman {

namespace {

constexpr char kMagic[8] = {'C', 'O', 'G', 'M', 'A', 'N', 'C', 'K'};

class Writer {
 public:
  explicit Writer(const std::filesystem::path& p) : out_(p, std::ios::binary) {
    if (!out_) throw IoError("cannot open checkpoint for writing: " + p.string());
  }
  template <class T>
  void put(T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    out_.write(reinterpret_cast<const char*>(b), sizeof(T));
  }
  void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void vec(const std::vector<double>& v) {
    put<std::uint64_t>(v.size());
    for (double x : v) put(x);
  }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("failed writing checkpoint");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& p) : in_(p, std::ios::binary) {
    if (!in_) throw IoError("cannot open checkpoint: " + p.string());
  }
  template <class T>
  T get() {
    unsigned char b[sizeof(T)];
    in_.read(reinterpret_cast<char*>(b), sizeof(T));
    if (!in_) throw IoError("truncated checkpoint");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
  void raw(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (!in_) throw IoError("truncated checkpoint");
  }
  std::vector<double> vec(std::size_t expected) {
    const auto n = get<std::uint64_t>();
    if (n != expected) throw IoError("checkpoint array size mismatch");
    std::vector<double> v(n);
    for (double& x : v) x = get<double>();
    return v;
  }

 private:
  std::ifstream in_;
};

void put_net(Writer& w, const nn::Mlp& net) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(net.sizes().size()));
  for (int s : net.sizes()) w.put<std::uint32_t>(static_cast<std::uint32_t>(s));
  w.vec(net.params());
}

void get_net(Reader& r, nn::Mlp& net) {
  const auto n = r.get<std::uint32_t>();
  if (n != net.sizes().size()) throw IoError("checkpoint layer count mismatch");
  for (int s : net.sizes()) {
    if (r.get<std::uint32_t>() != static_cast<std::uint32_t>(s)) {
      throw IoError("checkpoint layer shape mismatch");
    }
  }
  net.params() = r.vec(net.params().size());
}

void put_opt(Writer& w, nn::Adam& opt) {
  w.put<std::int64_t>(opt.t());
  w.vec(opt.m());
  w.vec(opt.v());
}

void get_opt(Reader& r, nn::Adam& opt) {
  opt.t() = r.get<std::int64_t>();
  opt.m() = r.vec(opt.m().size());
  opt.v() = r.vec(opt.v().size());
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  Writer w(path);
  w.raw(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint64_t>(ckpt.config_hash);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ckpt.obs.mode));
  w.put<std::int32_t>(ckpt.obs.crop);
  w.put<std::int32_t>(ckpt.obs.image_side);
  w.put<std::int32_t>(ckpt.obs.history);
  w.put<double>(ckpt.obs.clamp);
  for (int i = 0; i < 4; ++i) w.put<double>(ckpt.final_E_r[i]);

  // The actor's action distribution depends on these besides the weights.
  SacAgent agent = ckpt.agent;
  const SacConfig& c = agent.config();
  w.put<std::int32_t>(agent.obs_dim());
  w.put<std::int32_t>(agent.act_dim());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.hidden.size()));
  for (int h : c.hidden) w.put<std::int32_t>(h);
  w.put<double>(c.log_std_init);
  w.put<double>(c.log_std_min);
  w.put<double>(c.log_std_max);
  w.put<double>(agent.log_alpha());

  put_net(w, agent.actor());
  for (int i = 0; i < 2; ++i) put_net(w, agent.critic(i));
  for (int i = 0; i < 2; ++i) put_net(w, agent.target(i));
  put_opt(w, agent.actor_opt());
  for (int i = 0; i < 2; ++i) put_opt(w, agent.critic_opt(i));
  put_opt(w, agent.alpha_opt());
  w.finish();
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingCheckpoint("no checkpoint at " + path.string());
  Reader r(path);
  char magic[8];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw IoError("not a checkpoint file");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto hash = r.get<std::uint64_t>();
  ObservationSpec obs;
  const auto mode = r.get<std::uint32_t>();
  if (mode > static_cast<std::uint32_t>(ObsMode::FullImage)) throw IoError("bad observation mode");
  obs.mode = static_cast<ObsMode>(mode);
  obs.crop = r.get<std::int32_t>();
  obs.image_side = r.get<std::int32_t>();
  obs.history = r.get<std::int32_t>();
  obs.clamp = r.get<double>();
  Vec4 E_r;
  for (int i = 0; i < 4; ++i) E_r[i] = r.get<double>();

  const int obs_dim = r.get<std::int32_t>();
  const int act_dim = r.get<std::int32_t>();
  if (obs_dim != obs.dim() || act_dim <= 0) throw IoError("checkpoint dimensions inconsistent");
  SacConfig cfg;
  const auto layers = r.get<std::uint32_t>();
  if (layers > 64) throw IoError("implausible layer count in checkpoint");
  cfg.hidden.assign(layers, 0);
  for (int& h : cfg.hidden) h = r.get<std::int32_t>();
  cfg.log_std_init = r.get<double>();
  cfg.log_std_min = r.get<double>();
  cfg.log_std_max = r.get<double>();
  const double log_alpha = r.get<double>();

  Checkpoint ck{hash, obs, E_r, SacAgent(obs_dim, act_dim, cfg, 0)};
  ck.agent.log_alpha() = log_alpha;
  get_net(r, ck.agent.actor());
  for (int i = 0; i < 2; ++i) get_net(r, ck.agent.critic(i));
  for (int i = 0; i < 2; ++i) get_net(r, ck.agent.target(i));
  get_opt(r, ck.agent.actor_opt());
  for (int i = 0; i < 2; ++i) get_opt(r, ck.agent.critic_opt(i));
  get_opt(r, ck.agent.alpha_opt());
  if (!ck.agent.finite()) throw IoError("checkpoint holds non-finite parameters");
  return ck;
}

}  // namespace cogman
