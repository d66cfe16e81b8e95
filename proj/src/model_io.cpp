#include <fstream>
#include <string>

#include <json.hpp>

#include "wordrec/error.hpp"
#include "wordrec/network.hpp"

namespace wordrec {

namespace {

constexpr int kFormatVersion = 1;

using json = nlohmann::ordered_json;

}  // namespace

void save_model(const Network& net, const ModelMeta& meta, const std::string& path) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["architecture"] = net.arch.layer_sizes;

  json layers = json::array();
  for (const Layer& layer : net.layers) {
    json jl;
    json rows = json::array();
    for (size_t o = 0; o < layer.weights.rows; ++o) {
      const double* row = layer.weights.row(o);
      rows.push_back(std::vector<double>(row, row + layer.weights.cols));
    }
    jl["weights"] = std::move(rows);
    jl["biases"] = layer.biases;
    layers.push_back(std::move(jl));
  }
  doc["layers"] = std::move(layers);
  doc["feature_config"] = {{"k", meta.kmeans_k}, {"coeff_count", meta.coeff_count}};
  doc["label_table"] = meta.labels;

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_failure, "cannot create " + path);
  out << doc.dump(1, '\t') << '\n';
  if (!out) fail(Errc::io_failure, "write failed: " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::missing_file, "cannot open " + path);

  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::schema_mismatch, path + ": " + e.what());
  }

  try {
    if (!doc.contains("format_version") || doc["format_version"].get<int>() != kFormatVersion) {
      fail(Errc::schema_mismatch, path + ": unknown model format version");
    }

    Model model;
    model.network.arch.layer_sizes = doc.at("architecture").get<std::vector<int>>();
    if (model.network.arch.layer_sizes.size() < 2) {
      fail(Errc::schema_mismatch, path + ": architecture too short");
    }

    const json& layers = doc.at("layers");
    if (layers.size() + 1 != model.network.arch.layer_sizes.size()) {
      fail(Errc::shape_mismatch, path + ": layer count does not match architecture");
    }
    for (size_t l = 0; l < layers.size(); ++l) {
      const size_t in_size = static_cast<size_t>(model.network.arch.layer_sizes[l]);
      const size_t out_size = static_cast<size_t>(model.network.arch.layer_sizes[l + 1]);

      Layer layer;
      const json& rows = layers[l].at("weights");
      if (rows.size() != out_size) {
        fail(Errc::shape_mismatch, path + ": weight row count mismatch in layer " +
                                       std::to_string(l));
      }
      layer.weights = Matrix(out_size, in_size);
      for (size_t o = 0; o < out_size; ++o) {
        const auto row = rows[o].get<std::vector<double>>();
        if (row.size() != in_size) {
          fail(Errc::shape_mismatch, path + ": weight row length mismatch in layer " +
                                         std::to_string(l));
        }
        std::copy(row.begin(), row.end(), layer.weights.row(o));
      }
      layer.biases = layers[l].at("biases").get<std::vector<double>>();
      if (layer.biases.size() != out_size) {
        fail(Errc::shape_mismatch,
             path + ": bias length mismatch in layer " + std::to_string(l));
      }
      model.network.layers.push_back(std::move(layer));
    }

    const json& fc = doc.at("feature_config");
    model.meta.kmeans_k = fc.at("k").get<int>();
    model.meta.coeff_count = fc.at("coeff_count").get<int>();
    model.meta.labels = doc.at("label_table").get<std::vector<std::string>>();
    return model;
  } catch (const json::exception& e) {
    fail(Errc::schema_mismatch, path + ": " + e.what());
  }
}

}  // namespace wordrec
