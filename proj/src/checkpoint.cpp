#include "hsx/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

namespace hsx {

namespace {

nlohmann::json config_json(const UNetConfig& cfg) {
  return nlohmann::json{{"levels", cfg.levels},
                        {"features", cfg.features},
                        {"blocks_per_level", cfg.blocks_per_level},
                        {"in_channels", cfg.in_channels},
                        {"out_channels", cfg.out_channels},
                        {"gn_max_groups", cfg.gn_max_groups},
                        {"coord_skip", cfg.coord_skip},
                        {"coord_channels", cfg.coord_channels}};
}

UNetConfig config_from_json(const nlohmann::json& j) {
  UNetConfig cfg;
  cfg.levels = j.at("levels").get<int>();
  cfg.features = j.at("features").get<std::vector<int>>();
  cfg.blocks_per_level = j.at("blocks_per_level").get<int>();
  cfg.in_channels = j.at("in_channels").get<int>();
  cfg.out_channels = j.at("out_channels").get<int>();
  cfg.gn_max_groups = j.at("gn_max_groups").get<int>();
  cfg.coord_skip = j.at("coord_skip").get<bool>();
  cfg.coord_channels = j.at("coord_channels").get<int>();
  return cfg;
}

void write_f64(std::ofstream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_f64(std::ifstream& in, std::vector<double>& v) {
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!in) throw CheckpointError("checkpoint truncated");
}

}  // namespace

void save_checkpoint(const Model& model, const std::filesystem::path& path,
                     bool with_adam) {
  const bool has_adam = with_adam && !model.adam.empty();
  nlohmann::json j;
  j["config"] = config_json(model.net.config());
  j["step"] = model.adam.t;
  j["has_adam"] = has_adam;
  const std::string blob = j.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint: " + path.string());
  out.write("HSXK", 4);
  const uint32_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), 4);
  const uint64_t len = blob.size();
  out.write(reinterpret_cast<const char*>(&len), 8);
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));

  const auto params = model.net.params();
  for (const Param* p : params) write_f64(out, p->value);
  if (has_adam) {
    for (const auto& m : model.adam.m) write_f64(out, m);
    for (const auto& v : model.adam.v) write_f64(out, v);
  }
  if (!out) throw Error("short checkpoint write: " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "HSXK", 4) != 0) {
    throw CheckpointError("bad checkpoint magic");
  }
  uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != 1) throw CheckpointError("unsupported checkpoint version");
  uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 8);
  if (!in || len > (1u << 20)) throw CheckpointError("bad checkpoint header");
  std::string blob(len, '\0');
  in.read(blob.data(), static_cast<std::streamsize>(len));
  if (!in) throw CheckpointError("checkpoint truncated");

  nlohmann::json j = nlohmann::json::parse(blob, nullptr, false);
  if (j.is_discarded()) throw CheckpointError("checkpoint config blob is not JSON");

  Model model;
  model.net = UNet(config_from_json(j.at("config")), 0);
  auto params = model.net.params();
  for (Param* p : params) read_f64(in, p->value);
  model.adam.t = j.at("step").get<int64_t>();
  if (j.at("has_adam").get<bool>()) {
    model.adam.ensure_shapes(params);
    for (auto& m : model.adam.m) read_f64(in, m);
    for (auto& v : model.adam.v) read_f64(in, v);
  }
  return model;
}

}  // namespace hsx
