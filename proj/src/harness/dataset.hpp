#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "metrics/metrics.hpp"

namespace slicereview::harness {

struct DatasetViolation {
  std::string file;
  std::string error;
};

struct FaultDataset {
  std::vector<metrics::FaultCase> cases;  // ordered by file name
  std::vector<DatasetViolation> violations;
};

/// Reads every *.json file in dir as one fault case. Bad files become
/// violations. The repo and diff fields resolve against the case file's
/// directory. Throws DatasetError when no case is valid.
FaultDataset load_fault_dataset(const std::filesystem::path& dir);

nlohmann::json fault_to_json(const metrics::FaultCase& fault);
/// Throws DatasetError naming the first bad field.
metrics::FaultCase fault_from_json(const nlohmann::json& j);

}  // namespace slicereview::harness
