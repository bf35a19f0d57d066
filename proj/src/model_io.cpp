#include "model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace arbor {

namespace {

constexpr char kMagic[8] = {'A', 'R', 'B', 'O', 'R', 'M', 'D', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u32(out, bits);
}

void put_string(std::string& out, std::string_view s) {
  put_u64(out, s.size());
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }

  float f32() {
    std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  std::string str() {
    std::uint64_t len = u64();
    need(len);
    std::string s(bytes_.substr(pos_, len));
    pos_ += len;
    return s;
  }

  void raw(char* dst, std::size_t len) {
    need(len);
    std::memcpy(dst, bytes_.data() + pos_, len);
    pos_ += len;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::uint64_t count) const {
    if (pos_ + count > bytes_.size())
      fail(ErrorCode::Malformed, "model container is truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void put_vocab(std::string& out, const Vocab& v) {
  put_u64(out, v.items().size());
  for (const std::string& item : v.items()) put_string(out, item);
}

Vocab read_vocab(Reader& r, bool with_unknown) {
  std::uint64_t count = r.u64();
  std::vector<std::string> items;
  items.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) items.push_back(r.str());
  Vocab v;
  v.restore(std::move(items), with_unknown);
  return v;
}

nlohmann::json channels_to_json(const std::vector<ChannelConfig>& channels) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ChannelConfig& c : channels)
    arr.push_back({{"source", c.source == ChannelSource::Form ? "form" : "upos"},
                   {"dim", c.dim}});
  return arr;
}

std::vector<ChannelConfig> channels_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) fail(ErrorCode::Config, "TypeError: 'channels' must be a list");
  std::vector<ChannelConfig> channels;
  for (const auto& item : arr) {
    if (!item.is_object()) fail(ErrorCode::Config, "TypeError: channel entries must be objects");
    ChannelConfig c;
    bool have_source = false, have_dim = false;
    for (auto it = item.begin(); it != item.end(); ++it) {
      if (it.key() == "source") {
        if (!it.value().is_string())
          fail(ErrorCode::Config, "TypeError: channel 'source' must be a string");
        std::string s = it.value().get<std::string>();
        if (s == "form")
          c.source = ChannelSource::Form;
        else if (s == "upos")
          c.source = ChannelSource::Upos;
        else
          fail(ErrorCode::Config, "TypeError: channel source must be 'form' or 'upos'");
        have_source = true;
      } else if (it.key() == "dim") {
        if (!it.value().is_number_integer())
          fail(ErrorCode::Config, "TypeError: channel 'dim' must be an integer");
        c.dim = it.value().get<int>();
        have_dim = true;
      } else {
        fail(ErrorCode::Config, "UnknownKey: channel key '" + it.key() + "'");
      }
    }
    if (!have_source || !have_dim)
      fail(ErrorCode::Config, "TypeError: channel entries need 'source' and 'dim'");
    channels.push_back(c);
  }
  return channels;
}

template <typename T>
T get_typed(const nlohmann::json& value, const char* key);

template <>
int get_typed<int>(const nlohmann::json& value, const char* key) {
  if (!value.is_number_integer())
    fail(ErrorCode::Config, std::string("TypeError: '") + key + "' must be an integer");
  return value.get<int>();
}

template <>
double get_typed<double>(const nlohmann::json& value, const char* key) {
  if (!value.is_number())
    fail(ErrorCode::Config, std::string("TypeError: '") + key + "' must be a number");
  return value.get<double>();
}

template <>
bool get_typed<bool>(const nlohmann::json& value, const char* key) {
  if (!value.is_boolean())
    fail(ErrorCode::Config, std::string("TypeError: '") + key + "' must be a boolean");
  return value.get<bool>();
}

template <>
std::uint64_t get_typed<std::uint64_t>(const nlohmann::json& value, const char* key) {
  if (!value.is_number_unsigned() && !value.is_number_integer())
    fail(ErrorCode::Config, std::string("TypeError: '") + key + "' must be an integer");
  return value.get<std::uint64_t>();
}

}  // namespace

std::string config_to_json(const ModelConfig& config) {
  nlohmann::json j;
  j["channels"] = channels_to_json(config.channels);
  j["lstm_layers"] = config.lstm_layers;
  j["lstm_dim"] = config.lstm_dim;
  j["head_hidden_dim"] = config.head_hidden_dim;
  j["qk_dim"] = config.qk_dim;
  j["case_fold"] = config.case_fold;
  j["seed"] = config.seed;
  return j.dump();
}

ModelConfig config_from_json(std::string_view json_text) {
  ModelConfig config;
  TrainSchedule ignored;
  parse_config_file(json_text, config, ignored);
  return config;
}

void parse_config_file(std::string_view text, ModelConfig& config, TrainSchedule& schedule) {
  std::string trimmed(text);
  if (trimmed.find_first_not_of(" \t\r\n") == std::string::npos) trimmed = "{}";
  nlohmann::json j = nlohmann::json::parse(trimmed, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) fail(ErrorCode::Config, "config is not valid JSON");
  if (!j.is_object()) fail(ErrorCode::Config, "config must be a JSON object");

  bool explicit_gold_upos = false;
  bool gold_upos_value = false;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "channels")
      config.channels = channels_from_json(it.value());
    else if (key == "lstm_layers")
      config.lstm_layers = get_typed<int>(it.value(), "lstm_layers");
    else if (key == "lstm_dim")
      config.lstm_dim = get_typed<int>(it.value(), "lstm_dim");
    else if (key == "head_hidden_dim")
      config.head_hidden_dim = get_typed<int>(it.value(), "head_hidden_dim");
    else if (key == "qk_dim")
      config.qk_dim = get_typed<int>(it.value(), "qk_dim");
    else if (key == "case_fold")
      config.case_fold = get_typed<bool>(it.value(), "case_fold");
    else if (key == "seed")
      config.seed = get_typed<std::uint64_t>(it.value(), "seed");
    else if (key == "use_gold_upos") {
      explicit_gold_upos = true;
      gold_upos_value = get_typed<bool>(it.value(), "use_gold_upos");
    } else if (key == "frozen_epochs")
      schedule.frozen_epochs = get_typed<int>(it.value(), "frozen_epochs");
    else if (key == "frozen_lr")
      schedule.frozen_lr = get_typed<double>(it.value(), "frozen_lr");
    else if (key == "main_epochs")
      schedule.main_epochs = get_typed<int>(it.value(), "main_epochs");
    else if (key == "batches_per_epoch")
      schedule.batches_per_epoch = get_typed<int>(it.value(), "batches_per_epoch");
    else if (key == "batch_size")
      schedule.batch_size = get_typed<int>(it.value(), "batch_size");
    else if (key == "peak_lr")
      schedule.peak_lr = get_typed<double>(it.value(), "peak_lr");
    else if (key == "warmup_epochs")
      schedule.warmup_epochs = get_typed<int>(it.value(), "warmup_epochs");
    else
      fail(ErrorCode::Config, "UnknownKey: '" + key + "'");
  }

  if (explicit_gold_upos && gold_upos_value != config.use_gold_upos())
    fail(ErrorCode::Config,
         "TypeError: 'use_gold_upos' contradicts the channel list (the flag holds exactly "
         "when a upos channel is configured)");
}

std::string serialize_model(const ParserModel& model) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kFormatVersion);
  put_string(out, config_to_json(model.config));
  put_u32(out, static_cast<std::uint32_t>(model.vocabs.channel.size()));
  for (const Vocab& v : model.vocabs.channel) put_vocab(out, v);
  put_vocab(out, model.vocabs.labels);
  put_vocab(out, model.vocabs.upos);
  put_vocab(out, model.vocabs.feats);
  put_u64(out, model.params.size());
  for (const Param& p : model.params) {
    put_string(out, p.name);
    put_u32(out, 2);
    put_u64(out, static_cast<std::uint64_t>(p.value.rows()));
    put_u64(out, static_cast<std::uint64_t>(p.value.cols()));
    for (Eigen::Index i = 0; i < p.value.rows(); ++i)
      for (Eigen::Index j = 0; j < p.value.cols(); ++j)
        put_f32(out, static_cast<float>(p.value(i, j)));
  }
  return out;
}

ParserModel deserialize_model(std::string_view bytes) {
  Reader r(bytes);
  char magic[8];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    fail(ErrorCode::Malformed, "not a model container (bad magic)");
  std::uint32_t version = r.u32();
  if (version != kFormatVersion)
    fail(ErrorCode::Malformed, "unsupported model format version " + std::to_string(version));

  ParserModel model;
  model.config = config_from_json(r.str());
  std::uint32_t n_channels = r.u32();
  if (n_channels != model.config.channels.size())
    fail(ErrorCode::Malformed, "channel vocabulary count does not match the config");
  for (std::uint32_t k = 0; k < n_channels; ++k)
    model.vocabs.channel.push_back(read_vocab(r, /*with_unknown=*/true));
  model.vocabs.labels = read_vocab(r, false);
  model.vocabs.upos = read_vocab(r, false);
  model.vocabs.feats = read_vocab(r, false);

  std::uint64_t n_params = r.u64();
  for (std::uint64_t i = 0; i < n_params; ++i) {
    Param p;
    p.name = r.str();
    std::uint32_t ndim = r.u32();
    if (ndim != 2) fail(ErrorCode::Malformed, "parameter arrays must be two-dimensional");
    std::uint64_t rows = r.u64();
    std::uint64_t cols = r.u64();
    p.value.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::uint64_t a = 0; a < rows; ++a)
      for (std::uint64_t b = 0; b < cols; ++b)
        p.value(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            static_cast<double>(r.f32());
    model.params.push_back(std::move(p));
  }
  if (!r.done()) fail(ErrorCode::Malformed, "trailing bytes after the model container");

  std::vector<ParamShape> layout = param_layout(model.config, model.vocabs);
  if (layout.size() != model.params.size())
    fail(ErrorCode::Malformed, "parameter count does not match the config");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const Param& p = model.params[i];
    if (p.name != layout[i].name || p.value.rows() != layout[i].rows ||
        p.value.cols() != layout[i].cols)
      fail(ErrorCode::Malformed, "parameter '" + p.name + "' does not match the config layout");
  }
  model.rebuild_index();
  return model;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(ErrorCode::Io, "error while reading '" + path + "'");
  return buffer.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorCode::Io, "error while writing '" + path + "'");
}

void save_model(const ParserModel& model, const std::string& path) {
  write_file(path, serialize_model(model));
}

ParserModel load_model(const std::string& path) {
  return deserialize_model(read_file(path));
}

}  // namespace arbor
