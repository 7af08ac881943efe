#pragma once

#include <filesystem>

#include "metrics/metrics.hpp"

namespace slicereview::harness {

/// Writes dir/report.json and, when asked, dir/report.txt. Creates dir.
/// Throws IoError when the directory cannot be written.
void emit_report(const metrics::MetricsReport& report, const std::filesystem::path& dir, bool text = true);

/// Reads a report.json back. Throws IoError or DatasetError.
metrics::MetricsReport load_report(const std::filesystem::path& path);

}  // namespace slicereview::harness
