#include "unistitch/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "unistitch/error.hpp"

namespace unistitch {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* begin = value.data();
  const char* end = begin + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    fail(ErrorCode::InvalidConfig, "invalid value for " + key + ": '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  fail(ErrorCode::InvalidConfig, "invalid boolean for " + key + ": '" + value + "'");
}

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  fail(ErrorCode::InvalidConfig, "invalid config field " + field + ": " + why);
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void validate_config(const StitchConfig& cfg) {
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) invalid("lambda", "must be > 0");
  if (cfg.delta < 1) invalid("delta", "must be >= 1");
  if (cfg.k_g != 3 && cfg.k_g != 5) invalid("kg", "must be 3 or 5");
  if (cfg.r_telea < 1) invalid("radius", "must be >= 1");
  if (cfg.eps1 < 0 || cfg.eps1 > 255) invalid("eps1", "must lie in [0,255]");
  if (cfg.eps2 < 0 || cfg.eps2 > 255) invalid("eps2", "must lie in [0,255]");
  if (cfg.steps_n < 1) invalid("steps", "must be >= 1");
  if (!std::isfinite(cfg.guidance_scale)) invalid("guidance", "must be finite");
}

void apply_config_value(StitchConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "lambda") {
    cfg.lambda = parse_number<double>(key, value);
  } else if (key == "delta") {
    cfg.delta = parse_number<int>(key, value);
  } else if (key == "kg" || key == "k_g") {
    cfg.k_g = parse_number<int>(key, value);
  } else if (key == "radius" || key == "r_telea") {
    cfg.r_telea = parse_number<int>(key, value);
  } else if (key == "eps1") {
    cfg.eps1 = parse_number<int>(key, value);
  } else if (key == "eps2") {
    cfg.eps2 = parse_number<int>(key, value);
  } else if (key == "steps" || key == "steps_n") {
    cfg.steps_n = parse_number<int>(key, value);
  } else if (key == "guidance" || key == "guidance_scale") {
    cfg.guidance_scale = parse_number<double>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "prompt") {
    cfg.prompt = value;
  } else if (key == "no_coarse_rect") {
    cfg.ablation.disable_coarse_rectangling = parse_bool(key, value);
  } else if (key == "no_weighted_init") {
    cfg.ablation.disable_weighted_init = parse_bool(key, value);
  } else if (key == "no_weighted_inpaint") {
    cfg.ablation.disable_weighted_inpaint = parse_bool(key, value);
  } else {
    fail(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
  }
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::InvalidConfig,
           path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

StitchConfig load_config(const std::filesystem::path& path, StitchConfig base) {
  for (const auto& [key, value] : read_config_file(path)) {
    apply_config_value(base, key, value);
  }
  return base;
}

std::map<std::string, std::string> config_to_map(const StitchConfig& cfg) {
  return {
      {"lambda", format_double(cfg.lambda)},
      {"delta", std::to_string(cfg.delta)},
      {"kg", std::to_string(cfg.k_g)},
      {"radius", std::to_string(cfg.r_telea)},
      {"eps1", std::to_string(cfg.eps1)},
      {"eps2", std::to_string(cfg.eps2)},
      {"steps", std::to_string(cfg.steps_n)},
      {"guidance", format_double(cfg.guidance_scale)},
      {"seed", std::to_string(cfg.seed)},
      {"prompt", cfg.prompt},
      {"no_coarse_rect", cfg.ablation.disable_coarse_rectangling ? "true" : "false"},
      {"no_weighted_init", cfg.ablation.disable_weighted_init ? "true" : "false"},
      {"no_weighted_inpaint", cfg.ablation.disable_weighted_inpaint ? "true" : "false"},
  };
}

}  // namespace unistitch
