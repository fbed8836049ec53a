#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bfc/ensemble.hpp"

namespace bfc {

namespace detail {

inline nlohmann::json matrix_to_json(const DataMatrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"values", m.values()}};
}

inline DataMatrix matrix_from_json(const nlohmann::json& j) {
  DataMatrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != m.rows() * m.cols())
    throw std::runtime_error("ensemble file: corrupt matrix payload");
  for (std::size_t i = 0; i < values.size(); ++i)
    m.at(i / m.cols(), i % m.cols()) = values[i];
  return m;
}

}  // namespace detail

inline constexpr int kEnsembleFormatVersion = 1;

/// Persists a trained ensemble as versioned JSON. Doubles are written in
/// shortest round-trip form, so save/load is exact.
inline void save_ensemble(const std::string& path, const RegressionEnsemble& e) {
  nlohmann::json doc;
  doc["format"] = "bfc-ensemble";
  doc["version"] = kEnsembleFormatVersion;
  doc["model"] = to_string(e.kind);
  doc["kernel"] = {{"type", to_string(e.kernel.type)}, {"sigma", e.kernel.sigma}};
  doc["lambda"] = e.lambda;
  doc["epsilon"] = e.epsilon;
  doc["cost"] = e.cost;
  doc["processes"] = e.processes;
  if (e.standardizer.fitted())
    doc["standardizer"] = {{"mean", e.standardizer.mean},
                           {"scale", e.standardizer.scale}};
  doc["groups"] = nlohmann::json::array();
  for (const GroupModel& g : e.groups) {
    nlohmann::json jg;
    jg["id"] = g.group_id;
    jg["process"] = g.process;
    jg["center"] = g.center;
    if (const auto* lr = std::get_if<LinearModel>(&g.model)) {
      jg["lr"] = {{"weights", lr->weights}};
    } else if (const auto* krr = std::get_if<KrrModel>(&g.model)) {
      jg["krr"] = {{"lambda", krr->lambda},
                   {"alpha", krr->alpha},
                   {"y_offset", krr->y_offset},
                   {"support", detail::matrix_to_json(krr->support)}};
    } else {
      const auto& svr = std::get<SvrModel>(g.model);
      jg["svr"] = {{"epsilon", svr.epsilon},
                   {"cost", svr.cost},
                   {"beta", svr.beta},
                   {"bias", svr.bias},
                   {"y_offset", svr.y_offset},
                   {"support", detail::matrix_to_json(svr.support)}};
    }
    doc["groups"].push_back(std::move(jg));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ensemble file: " + path);
  out << doc.dump() << "\n";
}

inline RegressionEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ensemble file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": not a valid ensemble file (" +
                             std::string(e.what()) + ")");
  }
  if (doc.value("format", "") != "bfc-ensemble")
    throw std::runtime_error(path + ": not a bfc ensemble file");
  if (doc.value("version", 0) != kEnsembleFormatVersion)
    throw std::runtime_error(path + ": unsupported ensemble version");

  RegressionEnsemble e;
  e.kind = model_kind_from_string(doc.at("model").get<std::string>());
  e.kernel.type = kernel_type_from_string(doc.at("kernel").at("type").get<std::string>());
  e.kernel.sigma = doc.at("kernel").at("sigma").get<double>();
  e.lambda = doc.at("lambda").get<double>();
  e.epsilon = doc.at("epsilon").get<double>();
  e.cost = doc.at("cost").get<double>();
  e.processes = doc.at("processes").get<std::uint32_t>();
  if (doc.contains("standardizer")) {
    e.standardizer.mean = doc["standardizer"].at("mean").get<std::vector<double>>();
    e.standardizer.scale = doc["standardizer"].at("scale").get<std::vector<double>>();
  }
  for (const auto& jg : doc.at("groups")) {
    GroupModel g;
    g.group_id = jg.at("id").get<std::uint32_t>();
    g.process = jg.at("process").get<std::uint32_t>();
    g.center = jg.at("center").get<std::vector<double>>();
    if (jg.contains("lr")) {
      g.model = LinearModel{jg["lr"].at("weights").get<std::vector<double>>()};
    } else if (jg.contains("krr")) {
      KrrModel m;
      m.kernel = e.kernel;
      m.lambda = jg["krr"].at("lambda").get<double>();
      m.alpha = jg["krr"].at("alpha").get<std::vector<double>>();
      m.y_offset = jg["krr"].at("y_offset").get<double>();
      m.support = detail::matrix_from_json(jg["krr"].at("support"));
      g.model = std::move(m);
    } else if (jg.contains("svr")) {
      SvrModel m;
      m.kernel = e.kernel;
      m.epsilon = jg["svr"].at("epsilon").get<double>();
      m.cost = jg["svr"].at("cost").get<double>();
      m.beta = jg["svr"].at("beta").get<std::vector<double>>();
      m.bias = jg["svr"].at("bias").get<double>();
      m.y_offset = jg["svr"].at("y_offset").get<double>();
      m.support = detail::matrix_from_json(jg["svr"].at("support"));
      g.model = std::move(m);
    } else {
      throw std::runtime_error(path + ": group without a model payload");
    }
    e.groups.push_back(std::move(g));
  }
  return e;
}

}  // namespace bfc
