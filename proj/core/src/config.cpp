/*
 * Copyright 2026 The dcnsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dcnsim/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dcnsim/errors.hpp"

namespace dcnsim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view v, const std::string& where) {
  T out{};
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || end != v.data() + v.size()) {
    throw ConfigError(where + ": '" + std::string(v) + "' is not a valid number");
  }
  return out;
}

bool parse_bool(std::string_view v, const std::string& where) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw ConfigError(where + ": '" + std::string(v) + "' is not a boolean");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const std::string where = "config line " + std::to_string(line_no);

    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }

    if (key == "network") {
      cfg.network = std::string(value);
    } else if (key == "variant") {
      cfg.variant = parse_variant(value);
    } else if (key == "tile_rows") {
      cfg.tile_rows = parse_number<std::size_t>(value, where);
    } else if (key == "tile_cols") {
      cfg.tile_cols = parse_number<std::size_t>(value, where);
    } else if (key == "tile_size") {
      cfg.tile_size = parse_number<std::size_t>(value, where);
    } else if (key == "buffer_tiles") {
      cfg.buffer_tiles = parse_number<std::size_t>(value, where);
    } else if (key == "buffer_fraction") {
      cfg.buffer_fraction = parse_number<double>(value, where);
    } else if (key == "buffer_bytes") {
      cfg.buffer_bytes = parse_number<std::uint64_t>(value, where);
    } else if (key == "policy") {
      cfg.policy = parse_policy(value);
    } else if (key == "fusion") {
      cfg.fusion = parse_bool(value, where);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(value, where);
    } else if (key == "skew") {
      cfg.skew = parse_number<double>(value, where);
    } else {
      throw ConfigError(where + ": unknown key '" + std::string(key) + "'");
    }
  }
  if (cfg.tile_rows == 0 || cfg.tile_cols == 0) throw ConfigError("tile_rows and tile_cols must be positive");
  if (cfg.buffer_fraction < 0.0 || cfg.buffer_fraction > 1.0) {
    throw ConfigError("buffer_fraction must lie in [0, 1]");
  }
  if (cfg.skew < 0.0) throw ConfigError("skew must be non-negative");
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "network = \"" << cfg.network << "\"\n"
     << "variant = \"" << to_string(cfg.variant) << "\"\n"
     << "tile_rows = " << cfg.tile_rows << '\n'
     << "tile_cols = " << cfg.tile_cols << '\n'
     << "tile_size = " << cfg.tile_size << '\n'
     << "buffer_tiles = " << cfg.buffer_tiles << '\n'
     << "buffer_fraction = " << format_double(cfg.buffer_fraction) << '\n'
     << "buffer_bytes = " << cfg.buffer_bytes << '\n'
     << "policy = \"" << to_string(cfg.policy) << "\"\n"
     << "fusion = " << (cfg.fusion ? "true" : "false") << '\n'
     << "seed = " << cfg.seed << '\n'
     << "skew = " << format_double(cfg.skew) << '\n';
  return os.str();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse_config(ss.str());
  apply_env_overrides(cfg);
  return cfg;
}

void apply_env_overrides(ExperimentConfig& cfg) {
  if (const char* s = std::getenv("DCNSIM_SEED"); s && *s) {
    cfg.seed = parse_number<std::uint64_t>(trim(s), "DCNSIM_SEED");
  }
}

SimOptions to_sim_options(const ExperimentConfig& cfg) {
  SimOptions o;
  o.tile_rows = cfg.tile_rows;
  o.tile_cols = cfg.tile_cols;
  o.tile_size = cfg.tile_size;
  if (cfg.buffer_tiles) {
    o.capacity = CapacityRule::of_tiles(cfg.buffer_tiles);
  } else if (cfg.buffer_fraction > 0.0) {
    o.capacity = CapacityRule::of_fraction(cfg.buffer_fraction);
  } else {
    o.capacity = CapacityRule::of_bytes(cfg.buffer_bytes ? cfg.buffer_bytes : o.accel.in_buf);
  }
  o.policy = cfg.policy;
  o.fusion = cfg.fusion;
  o.seed = cfg.seed;
  o.skew = cfg.skew;
  return o;
}

}  // namespace dcnsim
