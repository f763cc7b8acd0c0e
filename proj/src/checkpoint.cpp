#include "tactile/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "tactile/errors.hpp"

namespace tactile {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes little-endian");

namespace {

constexpr char kMagic[8] = {'T', 'A', 'C', 'T', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw DataError("checkpoint truncated");
  return v;
}

void add_network(std::vector<TensorBlock>& blocks, const std::string& prefix, const Mlp& net) {
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    const auto w = net.weights(k);
    const auto b = net.bias(k);
    blocks.push_back({prefix + "." + std::to_string(k) + ".weight",
                      {net.sizes()[k], net.sizes()[k + 1]},
                      {w.begin(), w.end()}});
    blocks.push_back({prefix + "." + std::to_string(k) + ".bias", {net.sizes()[k + 1]}, {b.begin(), b.end()}});
  }
}

void add_normalizer(std::vector<TensorBlock>& blocks, const std::string& prefix, const Normalizer& n) {
  blocks.push_back({prefix + ".mean", {n.dim()}, n.mean()});
  blocks.push_back({prefix + ".std", {n.dim()}, n.stddev()});
}

const TensorBlock& find(const std::map<std::string, const TensorBlock*>& index, const std::string& name,
                        std::size_t expected) {
  const auto it = index.find(name);
  if (it == index.end()) throw DataError("checkpoint is missing block " + name);
  if (it->second->values.size() != expected) throw DataError("checkpoint block " + name + " has wrong size");
  return *it->second;
}

void load_network(const std::map<std::string, const TensorBlock*>& index, const std::string& prefix,
                  Mlp& net) {
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    auto w = net.weights(k);
    auto b = net.bias(k);
    const auto& wb = find(index, prefix + "." + std::to_string(k) + ".weight", w.size());
    const auto& bb = find(index, prefix + "." + std::to_string(k) + ".bias", b.size());
    std::copy(wb.values.begin(), wb.values.end(), w.begin());
    std::copy(bb.values.begin(), bb.values.end(), b.begin());
  }
}

}  // namespace

void write_blocks(const std::filesystem::path& path, const std::vector<TensorBlock>& blocks) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(blocks.size()));
  for (const TensorBlock& b : blocks) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(b.name.size()));
    out.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(b.shape.size()));
    for (std::uint64_t d : b.shape) put<std::uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(b.values.data()),
              static_cast<std::streamsize>(b.values.size() * sizeof(double)));
  }
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

std::vector<TensorBlock> read_blocks(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw DataError("not a checkpoint file");
  if (get<std::uint32_t>(in) != kVersion) throw DataError("unsupported checkpoint version");
  const auto count = get<std::uint32_t>(in);
  std::vector<TensorBlock> blocks(count);
  for (TensorBlock& b : blocks) {
    b.name.resize(get<std::uint32_t>(in));
    in.read(b.name.data(), static_cast<std::streamsize>(b.name.size()));
    b.shape.resize(get<std::uint32_t>(in));
    std::uint64_t n = 1;
    for (auto& d : b.shape) {
      d = get<std::uint64_t>(in);
      n *= d;
    }
    b.values.resize(n);
    in.read(reinterpret_cast<char*>(b.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw DataError("checkpoint truncated in block " + b.name);
  }
  return blocks;
}

void save_checkpoint(const DdpgAgent& agent, const std::filesystem::path& path) {
  std::vector<TensorBlock> blocks;
  add_network(blocks, "actor", agent.actor());
  add_network(blocks, "critic", agent.critic());
  add_network(blocks, "target_actor", agent.target_actor());
  add_network(blocks, "target_critic", agent.target_critic());
  add_normalizer(blocks, "obs_norm", agent.obs_normalizer());
  add_normalizer(blocks, "goal_norm", agent.goal_normalizer());
  write_blocks(path, blocks);

  const DdpgHyper& h = agent.hyper();
  nlohmann::json side{
      {"format", "TACTCKPT"},
      {"version", kVersion},
      {"actor_sizes", agent.actor().sizes()},
      {"critic_sizes", agent.critic().sizes()},
      {"hyper",
       {{"hidden", h.hidden},
        {"gamma", h.gamma},
        {"tau", h.tau},
        {"lr_actor", h.lr_actor},
        {"lr_critic", h.lr_critic},
        {"optimizer", to_string(h.optimizer)},
        {"noise_sigma", h.noise_sigma},
        {"random_eps", h.random_eps},
        {"batch_size", h.batch_size},
        {"action_l2", h.action_l2},
        {"q_clip", {h.q_clip_low, h.q_clip_high}},
        {"obs_clip", h.obs_clip}}},
  };
  std::filesystem::path json_path = path;
  json_path.replace_extension(".json");
  std::ofstream out(json_path);
  out << side.dump(2) << '\n';
}

void load_checkpoint(DdpgAgent& agent, const std::filesystem::path& path) {
  const auto blocks = read_blocks(path);
  std::map<std::string, const TensorBlock*> index;
  for (const auto& b : blocks) index[b.name] = &b;
  load_network(index, "actor", agent.actor());
  load_network(index, "critic", agent.critic());
  load_network(index, "target_actor", agent.target_actor());
  load_network(index, "target_critic", agent.target_critic());
  for (auto [prefix, norm] : {std::pair{"obs_norm", &agent.obs_normalizer()},
                              std::pair{"goal_norm", &agent.goal_normalizer()}}) {
    const auto& m = find(index, std::string(prefix) + ".mean", norm->dim());
    const auto& s = find(index, std::string(prefix) + ".std", norm->dim());
    norm->set_statistics(m.values, s.values);
  }
}

}  // namespace tactile
