#include "afdmil/data/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "afdmil/data/feature_file.hpp"
#include "afdmil/numerics/byte_io.hpp"
#include "afdmil/numerics/errors.hpp"

namespace afdmil {

namespace fs = std::filesystem;

namespace {

void check_token(const std::string& value, const char* what) {
  if (value.empty() || value.find_first_of(" \t\r\n#") != std::string::npos) {
    throw FormatError(std::string(what) + " '" + value + "' must be a non-empty word");
  }
}

std::string format_coords(const std::vector<std::array<double, 2>>& coords) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& c : coords) {
    out << c[0] << ',' << c[1] << '\n';
  }
  return out.str();
}

std::vector<std::array<double, 2>> parse_coords(const fs::path& path) {
  std::istringstream in(bytes::read_file(path));
  std::vector<std::array<double, 2>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw FormatError(path.string() + ": expected 'x,y', got '" + line + "'");
    }
    try {
      const double x = std::stod(line.substr(0, comma));
      const double y = std::stod(line.substr(comma + 1));
      out.push_back({x, y});
    } catch (const std::logic_error&) {
      throw FormatError(path.string() + ": bad coordinate row '" + line + "'");
    }
  }
  return out;
}

std::vector<int> parse_latent(const fs::path& path) {
  std::istringstream in(bytes::read_file(path));
  std::vector<int> out;
  std::string token;
  while (in >> token) {
    if (token != "0" && token != "1" && token != "2") {
      throw FormatError(path.string() + ": latent label must be 0, 1 or 2, got '" + token + "'");
    }
    out.push_back(token[0] - '0');
  }
  return out;
}

}  // namespace

fs::path save_dataset(const Dataset& dataset, const fs::path& dir, const Provenance* provenance) {
  check_token(dataset.name, "dataset name");
  fs::create_directories(dir);
  std::ostringstream m;
  m << "format " << kManifestFormat << '\n';
  m << "name " << dataset.name << '\n';
  m << "dim " << dataset.dim << '\n';
  if (provenance != nullptr) {
    m << "generator.kind " << provenance->kind << '\n';
    m << "generator.seed " << provenance->seed << '\n';
    m << "generator.rng " << provenance->rng << '\n';
    for (const auto& [key, value] : provenance->params) {
      m << "generator.param." << key << ' ' << value << '\n';
    }
  }
  for (const Bag& bag : dataset.bags) {
    check_token(bag.id, "bag id");
    validate_bag(bag, dataset.dim);
    const std::string features = "features/" + bag.id + ".afdf";
    write_features(bag.features, dir / features);
    std::string coords = "-";
    if (bag.coords) {
      coords = "coords/" + bag.id + ".csv";
      bytes::write_file(dir / coords, format_coords(*bag.coords));
    }
    std::string latent = "-";
    if (bag.latent) {
      latent = "latent/" + bag.id + ".txt";
      std::string text;
      for (int v : *bag.latent) {
        text += std::to_string(v);
        text += '\n';
      }
      bytes::write_file(dir / latent, text);
    }
    m << "bag " << bag.id << ' ' << bag.label << ' ' << bag.size() << ' ' << features << ' '
      << coords << ' ' << latent << '\n';
  }
  const fs::path manifest = dir / "manifest.txt";
  bytes::write_file(manifest, m.str());
  return manifest;
}

Dataset load_dataset(const fs::path& manifest, Provenance* provenance) {
  std::istringstream in(bytes::read_file(manifest));
  const fs::path base = manifest.parent_path();
  Dataset ds;
  Provenance prov;
  bool have_format = false;
  bool have_dim = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) {
      continue;
    }
    const std::string where = manifest.string() + ":" + std::to_string(line_no);
    if (key == "format") {
      std::string v;
      fields >> v;
      if (v != kManifestFormat) {
        throw FormatError(where + ": unsupported manifest format '" + v + "'");
      }
      have_format = true;
    } else if (key == "name") {
      fields >> ds.name;
    } else if (key == "dim") {
      if (!(fields >> ds.dim) || ds.dim < 1) {
        throw FormatError(where + ": bad dim");
      }
      have_dim = true;
    } else if (key == "generator.kind") {
      fields >> prov.kind;
    } else if (key == "generator.seed") {
      fields >> prov.seed;
    } else if (key == "generator.rng") {
      fields >> prov.rng;
    } else if (key.rfind("generator.param.", 0) == 0) {
      fields >> prov.params[key.substr(16)];
    } else if (key == "bag") {
      if (!have_format || !have_dim) {
        throw FormatError(where + ": bag entry before format/dim header");
      }
      Bag bag;
      Index k = 0;
      std::string features, coords, latent;
      if (!(fields >> bag.id >> bag.label >> k >> features >> coords >> latent)) {
        throw FormatError(where + ": bag entry needs id label K features coords latent");
      }
      const FeatureHeader h = read_feature_header(base / features);
      if (static_cast<Index>(h.rows) != k || static_cast<Index>(h.cols) != ds.dim) {
        throw FormatError(where + ": " + features + " holds " + std::to_string(h.rows) + "x" +
                          std::to_string(h.cols) + ", manifest says " + std::to_string(k) + "x" +
                          std::to_string(ds.dim));
      }
      bag.features = read_features(base / features);
      if (coords != "-") {
        bag.coords = parse_coords(base / coords);
      }
      if (latent != "-") {
        bag.latent = parse_latent(base / latent);
      }
      try {
        validate_bag(bag, ds.dim);
      } catch (const Error& e) {
        throw FormatError(where + ": " + e.what());
      }
      ds.bags.push_back(std::move(bag));
    } else {
      throw FormatError(where + ": unknown key '" + key + "'");
    }
  }
  if (!have_format) {
    throw FormatError(manifest.string() + ": missing 'format' line");
  }
  if (ds.bags.empty()) {
    throw FormatError(manifest.string() + ": no bags");
  }
  if (provenance != nullptr) {
    *provenance = std::move(prov);
  }
  return ds;
}

}  // namespace afdmil
