#include "harness/report.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

namespace slicereview::harness {

void emit_report(const metrics::MetricsReport& report, const std::filesystem::path& dir, bool text) {
  write_file(dir / "report.json", metrics::report_to_json(report).dump(2) + "\n");
  if (text) write_file(dir / "report.txt", metrics::report_to_text(report));
}

metrics::MetricsReport load_report(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(path.string() + ": " + e.what());
  }
  return metrics::report_from_json(j);
}

}  // namespace slicereview::harness
