#include "mean/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mean/errors.hpp"

namespace mean {

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view key, std::string_view value) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + std::string(key) + "': not a number: '" + std::string(value) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + std::string(key) + "': not a non-negative integer: '" +
                      std::string(value) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + std::string(key) + "': expected true/false, got '" + std::string(value) + "'");
}

std::vector<std::string_view> split_commas(std::string_view value) {
  std::vector<std::string_view> out;
  while (!value.empty()) {
    auto comma = value.find(',');
    auto item = strip(value.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

Path parse_path_name(std::string_view name) {
  if (name == "s" || name == "sentiment") return Path::Sentiment;
  if (name == "i" || name == "intensity") return Path::Intensity;
  if (name == "n" || name == "negation") return Path::Negation;
  throw ConfigError("unknown attention path '" + std::string(name) + "' (expected s, i or n)");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout_rate must lie in [0,1)");
  loss().validate();
  if (use_char_cnn) {
    if (kernel_sizes.empty()) throw ConfigError("kernel_sizes must not be empty");
    if (d_char == 0 || d_char % kernel_sizes.size() != 0) {
      throw ConfigError("d_char must be a positive multiple of the number of kernel sizes");
    }
    if (char_channels == 0) throw ConfigError("char_channels must be >= 1");
    for (auto k : kernel_sizes)
      if (k == 0) throw ConfigError("kernel sizes must be >= 1");
  }
  if (d_word == 0) throw ConfigError("d_word must be >= 1");
  if (h_dim == 0 || a_dim == 0) throw ConfigError("h_dim and a_dim must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(rmsprop_decay >= 0.0 && rmsprop_decay < 1.0)) throw ConfigError("rmsprop_decay must lie in [0,1)");
  if (!(rmsprop_epsilon > 0.0)) throw ConfigError("rmsprop_epsilon must be > 0");
  if (num_classes < 2) throw ConfigError("num_classes must be >= 2");
}

void set_config_value(TrainConfig& c, std::string_view key, std::string_view value) {
  value = strip(value);
  if (key == "batch_size") c.batch_size = parse_uint(key, value);
  else if (key == "dropout_rate") c.dropout_rate = parse_double(key, value);
  else if (key == "lambda") c.lambda = parse_double(key, value);
  else if (key == "mu") c.mu = parse_double(key, value);
  else if (key == "psi") c.psi = parse_double(key, value);
  else if (key == "d_char") c.d_char = parse_uint(key, value);
  else if (key == "d_word") c.d_word = parse_uint(key, value);
  else if (key == "kernel_sizes") {
    c.kernel_sizes.clear();
    for (auto item : split_commas(value)) c.kernel_sizes.push_back(parse_uint(key, item));
  } else if (key == "char_channels") c.char_channels = parse_uint(key, value);
  else if (key == "h_dim") c.h_dim = parse_uint(key, value);
  else if (key == "a_dim") c.a_dim = parse_uint(key, value);
  else if (key == "learning_rate") c.learning_rate = parse_double(key, value);
  else if (key == "rmsprop_decay") c.rmsprop_decay = parse_double(key, value);
  else if (key == "rmsprop_epsilon") c.rmsprop_epsilon = parse_double(key, value);
  else if (key == "max_epochs") c.max_epochs = parse_uint(key, value);
  else if (key == "patience") c.patience = parse_uint(key, value);
  else if (key == "rng_seed") c.rng_seed = parse_uint(key, value);
  else if (key == "num_classes") c.num_classes = parse_uint(key, value);
  else if (key == "use_char_cnn") c.use_char_cnn = parse_bool(key, value);
  else if (key == "disabled_paths") {
    c.path_enabled = {true, true, true};
    for (auto item : split_commas(value)) c.path_enabled[static_cast<std::size_t>(parse_path_name(item))] = false;
  } else if (key == "gradcheck") c.gradcheck = parse_bool(key, value);
  else if (key == "vectors_path") c.vectors_path = std::string(value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

std::vector<std::string> apply_config_text(TrainConfig& config, std::string_view text) {
  std::vector<std::string> keys;
  std::size_t lineno = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = strip(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    auto key = strip(line.substr(0, eq));
    set_config_value(config, key, line.substr(eq + 1));
    keys.emplace_back(key);
  }
  return keys;
}

TrainConfig parse_config(std::string_view text) {
  TrainConfig config;
  apply_config_text(config, text);
  return config;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_config_text(const TrainConfig& c) {
  std::ostringstream os;
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << "batch_size=" << c.batch_size << '\n'
     << "dropout_rate=" << format_double(c.dropout_rate) << '\n'
     << "lambda=" << format_double(c.lambda) << '\n'
     << "mu=" << format_double(c.mu) << '\n'
     << "psi=" << format_double(c.psi) << '\n'
     << "d_char=" << c.d_char << '\n'
     << "d_word=" << c.d_word << '\n'
     << "kernel_sizes=";
  for (std::size_t i = 0; i < c.kernel_sizes.size(); ++i) os << (i ? "," : "") << c.kernel_sizes[i];
  os << '\n'
     << "char_channels=" << c.char_channels << '\n'
     << "h_dim=" << c.h_dim << '\n'
     << "a_dim=" << c.a_dim << '\n'
     << "learning_rate=" << format_double(c.learning_rate) << '\n'
     << "rmsprop_decay=" << format_double(c.rmsprop_decay) << '\n'
     << "rmsprop_epsilon=" << format_double(c.rmsprop_epsilon) << '\n'
     << "max_epochs=" << c.max_epochs << '\n'
     << "patience=" << c.patience << '\n'
     << "rng_seed=" << c.rng_seed << '\n'
     << "num_classes=" << c.num_classes << '\n'
     << "use_char_cnn=" << b(c.use_char_cnn) << '\n'
     << "disabled_paths=";
  bool first = true;
  for (auto p : kPaths) {
    if (c.path_enabled[static_cast<std::size_t>(p)]) continue;
    os << (first ? "" : ",") << std::string_view("sin").substr(static_cast<std::size_t>(p), 1);
    first = false;
  }
  os << '\n'
     << "gradcheck=" << b(c.gradcheck) << '\n'
     << "vectors_path=" << c.vectors_path << '\n';
  return os.str();
}

}  // namespace mean
