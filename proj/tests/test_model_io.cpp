#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "nsgp/errors.hpp"
#include "nsgp/model_io.hpp"

using namespace nsgp;

namespace {

ModelDocument sample_document() {
  KernelSpec spec;
  spec.family = KernelFamily::ParametricNS;
  spec.dim = 1;
  spec.num_g = 2;
  spec.basis_centers.resize(6, 1);
  spec.basis_centers << 0.0, 0.2, 0.4, 0.6, 0.8, 1.0;
  spec.fixed_nugget = 1e-3;

  HyperVector h = default_hypers(spec);
  h.set_scalar("length_scale", 0.17);

  Eigen::MatrixXd x(4, 1);
  x << 0.1, 0.35, 0.6, 0.92;
  Eigen::VectorXd y(4);
  y << 0.4, 0.8, 0.3, 0.55;

  ModelDocument doc;
  doc.model = GpModel(x, y, spec, h);
  doc.normalization.x_min = Eigen::VectorXd::Constant(1, -2.0);
  doc.normalization.x_max = Eigen::VectorXd::Constant(1, 6.0);
  doc.normalization.y_min = 10.0;
  doc.normalization.y_max = 30.0;
  doc.dataset_name = "roundtrip-check";
  return doc;
}

}  // namespace

TEST_CASE("model document round-trips through json") {
  const ModelDocument doc = sample_document();
  const std::string text = model_to_json(doc);
  const ModelDocument back = model_from_json(text);

  CHECK(back.dataset_name == doc.dataset_name);
  CHECK(back.model.spec().family == doc.model.spec().family);
  CHECK(back.model.spec().fixed_nugget == doc.model.spec().fixed_nugget);
  CHECK(back.model.prior_mean() == doc.model.prior_mean());
  CHECK((back.model.hypers().values - doc.model.hypers().values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.model.x_data() - doc.model.x_data()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.normalization.y_max == 30.0);

  // the reloaded model answers queries identically
  Eigen::MatrixXd xq(3, 1);
  xq << 0.2, 0.5, 0.7;
  const PosteriorSummary a = posterior(doc.model, xq);
  const PosteriorSummary b = posterior(back.model, xq);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.mean[i] == doctest::Approx(b.mean[i]).epsilon(1e-14));
    CHECK(a.variance[i] == doctest::Approx(b.variance[i]).epsilon(1e-14));
  }
}

TEST_CASE("model json exposes the documented schema") {
  const std::string text = model_to_json(sample_document());
  const nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j.at("format") == "nsgp-model-v1");
  CHECK(j.at("kernel").contains("family"));
  CHECK(j.at("kernel").contains("basis_centers"));
  CHECK(j.at("hypers").contains("values"));
  CHECK(j.at("hypers").contains("layout"));
  CHECK(j.at("hypers").at("layout").at(0).contains("name"));
  CHECK(j.at("normalization").contains("x_min"));
  CHECK(j.at("data").contains("x"));
  CHECK(j.at("prior_mean").is_number());
}

TEST_CASE("malformed documents raise data errors") {
  CHECK_THROWS_AS(model_from_json("{not json"), DataError);
  CHECK_THROWS_AS(model_from_json("{\"format\": \"other\"}"), DataError);
  // drop a required field
  nlohmann::json j = nlohmann::json::parse(model_to_json(sample_document()));
  j.erase("hypers");
  CHECK_THROWS_AS(model_from_json(j.dump()), DataError);
}

TEST_CASE("save and load through the filesystem") {
  const ModelDocument doc = sample_document();
  const std::string path =
      (std::filesystem::temp_directory_path() / "nsgp_model_io_roundtrip.json").string();
  save_model(path, doc);
  const ModelDocument back = load_model(path);
  CHECK(back.model.y_data().size() == 4);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), DataError);
}
