#include "perturbmap/model_io.hpp"

#include <fstream>
#include <stdexcept>

namespace perturbmap {

namespace {

using nlohmann::json;

double require_number(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number()) {
    throw std::invalid_argument(std::string("model json: missing numeric field '") +
                                key + "'");
  }
  return doc[key].get<double>();
}

int require_int(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) {
    throw std::invalid_argument(std::string("model json: missing integer field '") +
                                key + "'");
  }
  return doc[key].get<int>();
}

Configuration config_from_labels(const DiscreteModel& model, const json& labels) {
  if (!labels.is_array() || static_cast<int>(labels.size()) != model.num_variables()) {
    throw std::invalid_argument("model json: configuration length does not match domains");
  }
  Configuration x(model.num_variables());
  for (int i = 0; i < model.num_variables(); ++i) {
    if (!labels[i].is_number()) {
      throw std::invalid_argument("model json: configuration entries must be numbers");
    }
    x[i] = model.label_index(i, labels[i].get<double>());
  }
  return x;
}

}  // namespace

DiscreteModel model_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("domains") || !doc["domains"].is_array()) {
    throw std::invalid_argument("model json: expected object with a 'domains' array");
  }
  for (const auto& item : doc.items()) {
    const std::string& key = item.key();
    if (key != "domains" && key != "unary" && key != "pairwise" && key != "forbidden") {
      throw std::invalid_argument("model json: unknown field '" + key + "'");
    }
  }
  std::vector<std::vector<double>> domains;
  for (const auto& dom : doc["domains"]) {
    if (!dom.is_array() || dom.empty()) {
      throw std::invalid_argument("model json: each domain must be a non-empty array");
    }
    std::vector<double> labels;
    for (const auto& v : dom) {
      if (!v.is_number()) {
        throw std::invalid_argument("model json: domain labels must be numbers");
      }
      const double value = v.get<double>();
      for (double seen : labels) {
        if (seen == value) {
          throw std::invalid_argument("model json: duplicate label value in a domain");
        }
      }
      labels.push_back(value);
    }
    domains.push_back(std::move(labels));
  }
  DiscreteModel model(std::move(domains));

  if (doc.contains("unary")) {
    if (!doc["unary"].is_array()) {
      throw std::invalid_argument("model json: 'unary' must be an array");
    }
    for (const auto& entry : doc["unary"]) {
      const int var = require_int(entry, "var");
      const double label = require_number(entry, "label");
      const double score = require_number(entry, "score");
      model.add_unary(var, model.label_index(var, label), score);
    }
  }
  if (doc.contains("pairwise")) {
    if (!doc["pairwise"].is_array()) {
      throw std::invalid_argument("model json: 'pairwise' must be an array");
    }
    for (const auto& entry : doc["pairwise"]) {
      const int var_i = require_int(entry, "var_i");
      const int var_j = require_int(entry, "var_j");
      const double label_i = require_number(entry, "label_i");
      const double label_j = require_number(entry, "label_j");
      const double score = require_number(entry, "score");
      model.add_pairwise(var_i, var_j, model.label_index(var_i, label_i),
                         model.label_index(var_j, label_j), score);
    }
  }
  if (doc.contains("forbidden")) {
    if (!doc["forbidden"].is_array()) {
      throw std::invalid_argument("model json: 'forbidden' must be an array");
    }
    for (const auto& labels : doc["forbidden"]) {
      model.forbid(config_from_labels(model, labels));
    }
  }
  return model;
}

json model_to_json(const DiscreteModel& model) {
  if (model.constant() != 0.0) {
    throw std::invalid_argument(
        "model_to_json: models with a constant offset cannot be serialized");
  }
  json doc;
  doc["domains"] = json::array();
  for (int i = 0; i < model.num_variables(); ++i) doc["domains"].push_back(model.domain(i));

  json unary = json::array();
  for (int i = 0; i < model.num_variables(); ++i) {
    for (std::int32_t k = 0; k < model.domain_size(i); ++k) {
      const double s = model.unary(i, k);
      if (s == 0.0) continue;
      unary.push_back({{"var", i}, {"label", model.label_value(i, k)}, {"score", s}});
    }
  }
  doc["unary"] = std::move(unary);

  json pairwise = json::array();
  for (const auto& f : model.pairwise_factors()) {
    for (std::int32_t a = 0; a < f.size_i; ++a) {
      for (std::int32_t b = 0; b < f.size_j; ++b) {
        const double s = f.score(a, b);
        if (s == 0.0) continue;
        pairwise.push_back({{"var_i", f.var_i},
                            {"var_j", f.var_j},
                            {"label_i", model.label_value(f.var_i, a)},
                            {"label_j", model.label_value(f.var_j, b)},
                            {"score", s}});
      }
    }
  }
  doc["pairwise"] = std::move(pairwise);

  json forbidden = json::array();
  for (const auto& x : model.forbidden()) {
    json labels = json::array();
    for (int i = 0; i < model.num_variables(); ++i) {
      labels.push_back(model.label_value(i, x[i]));
    }
    forbidden.push_back(std::move(labels));
  }
  doc["forbidden"] = std::move(forbidden);
  return doc;
}

DiscreteModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::invalid_argument("cannot parse model file " + path + ": " + e.what());
  }
  return model_from_json(doc);
}

void save_model_file(const DiscreteModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << model_to_json(model).dump(2) << "\n";
}

}  // namespace perturbmap
