#include "afdmil/training/checkpoint.hpp"

#include <map>
#include <sstream>

#include <fmt/format.h>

#include "afdmil/numerics/byte_io.hpp"
#include "afdmil/numerics/errors.hpp"

namespace afdmil {

namespace {

std::map<std::string, std::string> config_entries(const TrainConfig& c) {
  return {
      {"lr", fmt::format("{}", c.adam.lr)},
      {"beta1", fmt::format("{}", c.adam.beta1)},
      {"beta2", fmt::format("{}", c.adam.beta2)},
      {"adam_eps", fmt::format("{}", c.adam.eps)},
      {"weight_decay", fmt::format("{}", c.adam.weight_decay)},
      {"epochs", std::to_string(c.epochs)},
      {"seed", std::to_string(c.seed)},
      {"k", std::to_string(c.forward.distill.k)},
      {"mode", std::string(to_string(c.forward.distill.mode))},
      {"fusion", std::string(to_string(c.forward.fusion))},
      {"feature_distillation", c.forward.feature_distillation ? "1" : "0"},
      {"attention_channel", c.forward.attention_channel ? "1" : "0"},
      {"global_loss", c.forward.global_loss ? "1" : "0"},
      {"validation_fraction", fmt::format("{}", c.validation_fraction)},
      {"threshold", fmt::format("{}", c.threshold)},
  };
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) {
      return d;
    }
  } catch (const std::logic_error&) {
  }
  throw FormatError("checkpoint: bad numeric value for " + key + ": '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) {
      return i;
    }
  } catch (const std::logic_error&) {
  }
  throw FormatError("checkpoint: bad integer value for " + key + ": '" + v + "'");
}

TrainConfig parse_config(const std::map<std::string, std::string>& kv) {
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw FormatError("checkpoint: missing config." + key);
    }
    return it->second;
  };
  TrainConfig c;
  c.adam.lr = to_double("lr", get("lr"));
  c.adam.beta1 = to_double("beta1", get("beta1"));
  c.adam.beta2 = to_double("beta2", get("beta2"));
  c.adam.eps = to_double("adam_eps", get("adam_eps"));
  c.adam.weight_decay = to_double("weight_decay", get("weight_decay"));
  c.epochs = static_cast<int>(to_int("epochs", get("epochs")));
  c.seed = static_cast<std::uint64_t>(std::stoull(get("seed")));
  c.forward.distill.k = static_cast<int>(to_int("k", get("k")));
  c.forward.distill.mode = parse_distill_mode(get("mode"));
  c.forward.fusion = parse_fusion_backend(get("fusion"));
  c.forward.feature_distillation = get("feature_distillation") == "1";
  c.forward.attention_channel = get("attention_channel") == "1";
  c.forward.global_loss = get("global_loss") == "1";
  c.validation_fraction = to_double("validation_fraction", get("validation_fraction"));
  c.threshold = to_double("threshold", get("threshold"));
  return c;
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  const ModelDims& d = ck.model.dims();
  std::string out = fmt::format("{}\nversion {}\nn {}\nh1 {}\nh2 {}\nd {}\nrng {}\nepoch {}\n",
                                kCheckpointMagic, kCheckpointVersion, d.n, d.h1, d.h2, d.d,
                                ck.rng.empty() ? "-" : ck.rng, ck.epoch);
  for (const auto& [key, value] : config_entries(ck.config)) {
    out += fmt::format("config.{} {}\n", key, value);
  }
  if (ck.validation) {
    const MetricsReport& v = *ck.validation;
    out += fmt::format("metric.acc {}\nmetric.recall {}\nmetric.precision {}\n", v.acc, v.recall,
                       v.precision);
    if (v.auc) {
      out += fmt::format("metric.auc {}\n", *v.auc);
    }
  }
  for (const Param& p : ck.model.params().params()) {
    out += fmt::format("tensor {} {} {}\n", p.name, p.value.rows(), p.value.cols());
  }
  out += "end\n";
  for (const Param& p : ck.model.params().params()) {
    for (Index i = 0; i < p.value.size(); ++i) {
      bytes::append<double>(out, p.value.data()[i]);
    }
  }
  bytes::write_file(path, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path, std::optional<Index> expected_n) {
  const std::string raw = bytes::read_file(path);
  const std::string origin = path.string();
  const std::string magic = std::string(kCheckpointMagic) + "\n";
  if (raw.compare(0, magic.size(), magic) != 0) {
    throw FormatError(origin + ": bad magic, not a checkpoint");
  }
  const auto end_pos = raw.find("\nend\n");
  if (end_pos == std::string::npos) {
    throw FormatError(origin + ": truncated manifest (no 'end' line)");
  }
  std::istringstream manifest(raw.substr(magic.size(), end_pos + 1 - magic.size()));
  std::size_t offset = end_pos + 5;

  std::map<std::string, std::string> header, config, metrics;
  std::vector<std::tuple<std::string, Index, Index>> tensors;
  std::string line;
  while (std::getline(manifest, line)) {
    std::istringstream f(line);
    std::string key;
    if (!(f >> key)) {
      continue;
    }
    if (key == "tensor") {
      std::string name;
      Index rows = -1, cols = -1;
      if (!(f >> name >> rows >> cols) || rows < 0 || cols < 0) {
        throw FormatError(origin + ": malformed tensor line '" + line + "'");
      }
      tensors.emplace_back(name, rows, cols);
      continue;
    }
    std::string value;
    f >> value;
    if (key.rfind("config.", 0) == 0) {
      config[key.substr(7)] = value;
    } else if (key.rfind("metric.", 0) == 0) {
      metrics[key.substr(7)] = value;
    } else {
      header[key] = value;
    }
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) {
      throw FormatError(origin + ": manifest lacks '" + key + "'");
    }
    return it->second;
  };
  if (to_int("version", need("version")) != kCheckpointVersion) {
    throw FormatError(origin + ": unsupported checkpoint version " + need("version"));
  }
  ModelDims dims;
  dims.n = to_int("n", need("n"));
  dims.h1 = to_int("h1", need("h1"));
  dims.h2 = to_int("h2", need("h2"));
  dims.d = to_int("d", need("d"));
  if (expected_n && *expected_n != dims.n) {
    throw DimensionError(origin + ": checkpoint feature width n=" + std::to_string(dims.n) +
                         " but data has n=" + std::to_string(*expected_n));
  }

  Checkpoint ck{AfdModel(dims), parse_config(config),
                static_cast<std::size_t>(to_int("epoch", need("epoch"))), std::nullopt,
                need("rng") == "-" ? std::string() : need("rng")};
  ck.config.dims = dims;

  auto& params = ck.model.params().params();
  if (tensors.size() != params.size()) {
    throw FormatError(origin + ": expected " + std::to_string(params.size()) + " tensors, found " +
                      std::to_string(tensors.size()));
  }
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    const auto& [name, rows, cols] = tensors[t];
    Param& p = params[t];
    if (name != p.name) {
      throw FormatError(origin + ": tensor " + std::to_string(t) + " is '" + name +
                        "', expected '" + p.name + "'");
    }
    if (rows != p.value.rows() || cols != p.value.cols()) {
      throw FormatError(origin + ": tensor '" + name + "' has shape " + shape_str(rows, cols) +
                        ", dims imply " + shape_str(p.value));
    }
    const auto bytes_needed = static_cast<std::size_t>(p.value.size()) * sizeof(double);
    if (raw.size() < offset + bytes_needed) {
      throw FormatError(origin + ": payload truncated inside tensor '" + name + "'");
    }
    for (Index i = 0; i < p.value.size(); ++i) {
      p.value.data()[i] = bytes::load<double>(raw, offset + static_cast<std::size_t>(i) * 8);
    }
    offset += bytes_needed;
  }
  if (offset != raw.size()) {
    throw FormatError(origin + ": " + std::to_string(raw.size() - offset) +
                      " trailing bytes after the last tensor");
  }
  if (!metrics.empty()) {
    MetricsReport m;
    m.acc = to_double("acc", metrics.at("acc"));
    m.recall = to_double("recall", metrics.at("recall"));
    m.precision = to_double("precision", metrics.at("precision"));
    if (metrics.count("auc") != 0) {
      m.auc = to_double("auc", metrics.at("auc"));
    }
    ck.validation = m;
  }
  return ck;
}

}  // namespace afdmil
