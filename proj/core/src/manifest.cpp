#include "unistitch/manifest.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "unistitch/error.hpp"
#include "unistitch/wire.hpp"

namespace unistitch {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kManifestName = "manifest.json";

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      EVP_MD_CTX_free(ctx_);
      fail(ErrorCode::Io, "SHA-256 unavailable");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md.data(), &len);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) {
      os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return os.str();
  }

 private:
  EVP_MD_CTX* ctx_;
};

json to_json(const RunManifest& m) {
  json inputs = json::array();
  for (const auto& in : m.inputs) {
    inputs.push_back({{"role", in.role}, {"path", in.path}, {"sha256", in.sha256}});
  }
  json timings = json::array();
  for (const auto& t : m.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  const auto& c = m.config;
  return json{
      {"schema", 1},
      {"tool_version", m.tool_version},
      {"mode", m.mode},
      {"config",
       {{"lambda", c.lambda},
        {"delta", c.delta},
        {"k_g", c.k_g},
        {"r_telea", c.r_telea},
        {"eps1", c.eps1},
        {"eps2", c.eps2},
        {"steps_n", c.steps_n},
        {"guidance_scale", c.guidance_scale},
        {"seed", c.seed},
        {"prompt", c.prompt},
        {"ablation",
         {{"disable_coarse_rectangling", c.ablation.disable_coarse_rectangling},
          {"disable_weighted_init", c.ablation.disable_weighted_init},
          {"disable_weighted_inpaint", c.ablation.disable_weighted_inpaint}}}}},
      {"inputs", inputs},
      {"backend", wire::capabilities_to_json(m.backend)},
      {"backend_url", m.backend_url},
      {"timings", timings},
  };
}

RunManifest from_json(const json& j) {
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.mode = j.at("mode").get<std::string>();
  const auto& c = j.at("config");
  m.config.lambda = c.at("lambda").get<double>();
  m.config.delta = c.at("delta").get<int>();
  m.config.k_g = c.at("k_g").get<int>();
  m.config.r_telea = c.at("r_telea").get<int>();
  m.config.eps1 = c.at("eps1").get<int>();
  m.config.eps2 = c.at("eps2").get<int>();
  m.config.steps_n = c.at("steps_n").get<int>();
  m.config.guidance_scale = c.at("guidance_scale").get<double>();
  m.config.seed = c.at("seed").get<std::uint64_t>();
  m.config.prompt = c.at("prompt").get<std::string>();
  const auto& a = c.at("ablation");
  m.config.ablation.disable_coarse_rectangling = a.at("disable_coarse_rectangling").get<bool>();
  m.config.ablation.disable_weighted_init = a.at("disable_weighted_init").get<bool>();
  m.config.ablation.disable_weighted_inpaint = a.at("disable_weighted_inpaint").get<bool>();
  for (const auto& in : j.at("inputs")) {
    m.inputs.push_back({in.at("role").get<std::string>(), in.at("path").get<std::string>(),
                        in.at("sha256").get<std::string>()});
  }
  m.backend = wire::capabilities_from_json(j.at("backend"));
  m.backend_url = j.at("backend_url").get<std::string>();
  for (const auto& t : j.at("timings")) {
    m.timings.push_back({t.at("stage").get<std::string>(), t.at("seconds").get<double>()});
  }
  return m;
}

}  // namespace

std::string version_string() { return UNISTITCH_VERSION; }

bool same_run(const RunManifest& a, const RunManifest& b) {
  RunManifest x = a;
  RunManifest y = b;
  x.timings.clear();
  y.timings.clear();
  return x == y;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

void write_manifest(const fs::path& dir, const RunManifest& manifest) {
  std::ofstream out(dir / kManifestName);
  if (!out) fail(ErrorCode::Io, "cannot write " + (dir / kManifestName).string());
  out << to_json(manifest).dump(2) << '\n';
}

RunManifest read_manifest(const fs::path& dir) {
  const fs::path path = dir / kManifestName;
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    fail(ErrorCode::CorruptFile, "malformed manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace unistitch
