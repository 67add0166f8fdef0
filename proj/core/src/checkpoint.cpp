#include "mean/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "mean/errors.hpp"

namespace mean {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void put_section(std::string& out, std::string_view name, std::string_view body) {
  out += name;
  out += ' ';
  out += std::to_string(body.size());
  out += '\n';
  out += body;
}

void put_double_le(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

double get_double_le(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::string lines_of(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    out += s;
    out += '\n';
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view body) {
  std::vector<std::string> out;
  while (!body.empty()) {
    auto nl = body.find('\n');
    out.emplace_back(body.substr(0, nl));
    if (nl == std::string_view::npos) break;
    body.remove_prefix(nl + 1);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view line() {
    auto nl = bytes_.find('\n', pos_);
    if (nl == std::string_view::npos) throw ParseError("truncated checkpoint");
    auto out = bytes_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    return out;
  }

  std::string_view section(std::string_view expected_name) {
    auto header = line();
    auto space = header.rfind(' ');
    if (space == std::string_view::npos || header.substr(0, space) != expected_name) {
      throw ParseError("checkpoint: expected section '" + std::string(expected_name) + "', found '" +
                       std::string(header) + "'");
    }
    const auto n = to_size(header.substr(space + 1));
    if (pos_ + n > bytes_.size()) throw ParseError("truncated checkpoint section " + std::string(expected_name));
    auto body = bytes_.substr(pos_, n);
    pos_ += n;
    return body;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

  static std::size_t to_size(std::string_view s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("checkpoint: invalid number '" + std::string(s) + "'");
    return v;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::unordered_set<std::string> to_set(const std::vector<std::string>& words) {
  return {words.begin(), words.end()};
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  std::string out;
  out += kCheckpointMagic;
  out += "\nversion " + std::to_string(kCheckpointVersion) + "\n";
  put_section(out, "config", to_config_text(ck.config));

  std::string meta = "epoch=" + std::to_string(ck.epoch) + "\n" +
                     "validation_accuracy=" + format_double(ck.validation_accuracy) + "\n" +
                     "rng_state=" + ck.rng_state + "\n";
  put_section(out, "meta", meta);

  std::vector<std::string> symbols(ck.vocab.symbols().begin() + 1, ck.vocab.symbols().end());
  put_section(out, "charvocab", lines_of(symbols));
  put_section(out, "lexicon.sentiment", lines_of(ck.bundle.sentiment().sorted_words()));
  put_section(out, "lexicon.negation", lines_of(ck.bundle.negation().sorted_words()));
  put_section(out, "lexicon.intensity", lines_of(ck.bundle.intensity().sorted_words()));

  const auto params = ck.params.parameters();
  std::string manifest = "manifest " + std::to_string(params.size()) + "\n";
  std::string data;
  for (const auto& p : params) {
    manifest += p.name + " " + std::to_string(p.value.rows()) + " " + std::to_string(p.value.cols()) + " " +
                std::to_string(data.size()) + "\n";
    for (double v : p.value.values()) put_double_le(data, v);
  }
  out += manifest;
  put_section(out, "data", data);
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader in(bytes);
  if (in.line() != kCheckpointMagic) throw ParseError("not a checkpoint (bad magic)");
  if (in.line() != "version " + std::to_string(kCheckpointVersion)) throw ParseError("unsupported checkpoint version");

  Checkpoint ck;
  ck.config = parse_config(in.section("config"));
  for (const auto& line : split_lines(in.section("meta"))) {
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("checkpoint meta: bad line '" + line + "'");
    auto key = line.substr(0, eq);
    auto value = line.substr(eq + 1);
    if (key == "epoch") {
      ck.epoch = Reader::to_size(value);
    } else if (key == "validation_accuracy") {
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), ck.validation_accuracy);
      if (ec != std::errc()) throw ParseError("checkpoint meta: bad validation_accuracy");
    } else if (key == "rng_state") {
      ck.rng_state = value;
    } else {
      throw ParseError("checkpoint meta: unknown key '" + key + "'");
    }
  }
  ck.vocab = CharVocab(split_lines(in.section("charvocab")));
  Lexicon sentiment(ResourceKind::Sentiment, to_set(split_lines(in.section("lexicon.sentiment"))));
  Lexicon negation(ResourceKind::Negation, to_set(split_lines(in.section("lexicon.negation"))));
  Lexicon intensity(ResourceKind::Intensity, to_set(split_lines(in.section("lexicon.intensity"))));
  ck.bundle = ResourceBundle(std::move(sentiment), std::move(negation), std::move(intensity));

  ck.params = ModelParams::zeros(ck.config, ck.vocab.size());
  auto params = ck.params.parameters();
  auto header = in.line();
  if (header.substr(0, 9) != "manifest ") throw ParseError("checkpoint: missing manifest");
  const auto count = Reader::to_size(header.substr(9));
  if (count != params.size()) {
    throw ParseError("checkpoint: manifest lists " + std::to_string(count) + " tensors, config implies " +
                     std::to_string(params.size()));
  }
  struct Entry {
    std::size_t rows, cols, offset;
  };
  std::unordered_map<std::string, Entry> manifest;
  for (std::size_t k = 0; k < count; ++k) {
    std::istringstream ls{std::string(in.line())};
    std::string name;
    Entry e{};
    if (!(ls >> name >> e.rows >> e.cols >> e.offset)) throw ParseError("checkpoint: bad manifest line");
    manifest.emplace(name, e);
  }
  const auto data = in.section("data");
  if (!in.at_end()) throw ParseError("checkpoint: trailing bytes");
  for (auto& p : params) {
    auto it = manifest.find(p.name);
    if (it == manifest.end()) throw ParseError("checkpoint: missing tensor " + p.name);
    const auto& e = it->second;
    if (e.rows != p.value.rows() || e.cols != p.value.cols()) {
      throw ParseError("checkpoint: tensor " + p.name + " has shape " + std::to_string(e.rows) + "x" +
                       std::to_string(e.cols) + ", expected " + shape_string(p.value.shape()));
    }
    if (e.offset + 8 * p.value.size() > data.size()) throw ParseError("checkpoint: tensor " + p.name + " out of bounds");
    auto dst = p.value.values_mut();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = get_double_le(data.data() + e.offset + 8 * i);
  }
  return ck;
}

void write_file_atomically(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename checkpoint into " + path.string());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  write_file_atomically(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

Checkpoint make_checkpoint(const Model& model, std::size_t epoch, double validation_accuracy,
                           std::string rng_state) {
  return {model.config(), model.params().clone(), model.vocab(), model.bundle(), epoch, validation_accuracy,
          std::move(rng_state)};
}

Model make_model(const Checkpoint& checkpoint, std::shared_ptr<const WordVectorStore> vectors) {
  return Model(checkpoint.config, checkpoint.params.clone(), checkpoint.vocab, checkpoint.bundle,
               std::move(vectors));
}

}  // namespace mean
