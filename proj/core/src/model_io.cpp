#include "nsgp/model_io.hpp"

#include <fstream>
#include <json.hpp>

#include "nsgp/errors.hpp"

namespace nsgp {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, Eigen::Index expected_cols = -1) {
  if (rows.empty()) return Eigen::MatrixXd(0, std::max<Eigen::Index>(expected_cols, 0));
  const Eigen::Index cols = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != cols)
      throw DataError("model json: ragged matrix");
    for (Eigen::Index j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), j) = rows[i][j].get<double>();
  }
  return m;
}

}  // namespace

std::string model_to_json(const ModelDocument& doc) {
  const GpModel& m = doc.model;
  json j;
  j["format"] = "nsgp-model-v1";
  j["dataset"] = doc.dataset_name;

  json kernel;
  kernel["family"] = family_name(m.spec().family);
  kernel["dim"] = m.spec().dim;
  kernel["num_g"] = m.spec().num_g;
  kernel["fixed_nugget"] = m.spec().fixed_nugget;
  kernel["trainable_nugget"] = m.spec().trainable_nugget;
  if (m.spec().uses_basis()) kernel["basis_centers"] = matrix_to_json(m.spec().basis_centers);
  if (m.spec().uses_net()) kernel["net_shape"] = m.spec().net_shape;
  j["kernel"] = std::move(kernel);

  j["prior_mean"] = m.prior_mean();

  json hypers;
  hypers["values"] = vector_to_json(m.hypers().values);
  hypers["lower"] = vector_to_json(m.hypers().lower);
  hypers["upper"] = vector_to_json(m.hypers().upper);
  json layout = json::array();
  for (const auto& s : m.hypers().layout.segments)
    layout.push_back({{"name", s.name}, {"offset", s.offset}, {"size", s.size}});
  hypers["layout"] = std::move(layout);
  j["hypers"] = std::move(hypers);

  json norm;
  norm["x_min"] = vector_to_json(doc.normalization.x_min);
  norm["x_max"] = vector_to_json(doc.normalization.x_max);
  norm["y_min"] = doc.normalization.y_min;
  norm["y_max"] = doc.normalization.y_max;
  j["normalization"] = std::move(norm);

  json data;
  data["x"] = matrix_to_json(m.x_data());
  data["y"] = vector_to_json(m.y_data());
  j["data"] = std::move(data);

  return j.dump(2);
}

ModelDocument model_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model json: parse failure: ") + e.what());
  }
  try {
    if (j.value("format", "") != "nsgp-model-v1")
      throw DataError("model json: unknown format tag");

    KernelSpec spec;
    const json& kernel = j.at("kernel");
    spec.family = family_from_name(kernel.at("family").get<std::string>());
    spec.dim = kernel.at("dim").get<int>();
    spec.num_g = kernel.value("num_g", 2);
    spec.fixed_nugget = kernel.value("fixed_nugget", 0.0);
    spec.trainable_nugget = kernel.value("trainable_nugget", false);
    if (kernel.contains("basis_centers"))
      spec.basis_centers = matrix_from_json(kernel.at("basis_centers"), spec.dim);
    if (kernel.contains("net_shape"))
      spec.net_shape = kernel.at("net_shape").get<std::vector<int>>();
    spec.validate();

    HyperVector hypers;
    hypers.layout = hyper_layout(spec);
    const json& hj = j.at("hypers");
    hypers.values = vector_from_json(hj.at("values"));
    hypers.lower = vector_from_json(hj.at("lower"));
    hypers.upper = vector_from_json(hj.at("upper"));
    hypers.validate();

    ModelDocument doc;
    const json& norm = j.at("normalization");
    doc.normalization.x_min = vector_from_json(norm.at("x_min"));
    doc.normalization.x_max = vector_from_json(norm.at("x_max"));
    doc.normalization.y_min = norm.at("y_min").get<double>();
    doc.normalization.y_max = norm.at("y_max").get<double>();
    doc.dataset_name = j.value("dataset", "");

    const json& data = j.at("data");
    const Eigen::MatrixXd x = matrix_from_json(data.at("x"), spec.dim);
    const Eigen::VectorXd y = vector_from_json(data.at("y"));
    doc.model = GpModel(x, y, spec, hypers, j.at("prior_mean").get<double>());
    return doc;
  } catch (const json::exception& e) {
    throw DataError(std::string("model json: missing or malformed field: ") + e.what());
  }
}

void save_model(const std::string& path, const ModelDocument& doc) {
  std::ofstream out(path);
  if (!out) throw DataError("save_model: cannot write '" + path + "'");
  out << model_to_json(doc) << '\n';
}

ModelDocument load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_model: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace nsgp
