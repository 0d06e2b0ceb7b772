#pragma once

#include <string>

#include "nsgp/data.hpp"
#include "nsgp/gp.hpp"

namespace nsgp {

/// A trained model together with the normalization needed to answer queries
/// in original units.
struct ModelDocument {
  GpModel model;
  Normalization normalization;
  std::string dataset_name;
};

std::string model_to_json(const ModelDocument& doc);
ModelDocument model_from_json(const std::string& json_text);

void save_model(const std::string& path, const ModelDocument& doc);
ModelDocument load_model(const std::string& path);

}  // namespace nsgp
