#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace trimix {

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct MetricsReport {
  std::string name;
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  std::vector<ClassMetrics> per_class;
  /// confusion[truth][predicted].
  std::vector<std::vector<std::uint64_t>> confusion;
  double wall_minutes = 0.0;
};

/// Metrics of a square confusion matrix (rows = truth, columns = prediction).
///
/// Per class: precision = tp / predicted, recall = tp / support,
/// F1 = 2PR / (P + R), each 0 when its denominator is 0. Weighted metrics
/// average the per-class values by support. Every value is evaluated in exact
/// rational arithmetic and rounded to double once, so weighted recall and
/// accuracy are the same double. Throws ConfigError on an empty or ragged
/// matrix.
MetricsReport metrics_from_confusion(const std::vector<std::vector<std::uint64_t>>& confusion,
                                     const std::vector<std::string>& labels = {});

/// Confusion matrix from paired label ids in [0, classes).
std::vector<std::vector<std::uint64_t>> confusion_matrix(std::span<const int> truth, std::span<const int> predicted,
                                                         std::size_t classes);

std::string report_json(const MetricsReport& report);
MetricsReport parse_report_json(const std::string& text, const std::string& source = "report");

/// Two-decimal rendering shared by the Markdown and JSON comparison tables.
std::string two_decimals(double x);

struct ComparisonTable {
  std::string markdown;
  std::string json;
};

/// Reports ranked by ascending weighted F1 (ties by name). Columns: Accuracy,
/// Weighted F1-Score, Precision, Recall, Time (Min). Throws ConfigError on
/// an empty set or duplicate names.
ComparisonTable compare_reports(std::vector<MetricsReport> reports);

}  // namespace trimix
