#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zite/basis.hpp"
#include "zite/reference.hpp"

namespace zite::cli {

enum class Task { Compute, Reference, Estimate, Convergence };
enum class OutputFormat { Csv, Json };

/// Invalid or incomplete run configuration (exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CoefficientSpec {
  std::string tag;
  std::vector<double> params;
};

/// How convergence errors are measured.
struct CauchyReference {};
struct ExactReference {};
using ConvergenceReference = std::variant<CauchyReference, ExactReference, double>;

struct RunConfig {
  Task task = Task::Compute;
  Domain domain;

  BasisOrdering ordering = BasisOrdering::PaperGrid;
  int p_max = 5;
  int q_max = 4;
  /// Basis size for ByLambda ordering.
  int basis_size = 24;
  bool include_sine = false;

  std::optional<CoefficientSpec> n;
  std::optional<CoefficientSpec> eta;

  int count = 3;
  double mu_tolerance = 1e-10;
  DispersionQuery window;
  bool compare_with_galerkin = false;
  Regime regime = Regime::LargeEta;
  EstimationMethod method = ClosedForm{};
  std::optional<double> k1;
  std::vector<int> sizes;
  ConvergenceReference reference = CauchyReference{};

  OutputFormat format = OutputFormat::Csv;
  std::string out_path;
  /// Eigenfunction grid points per direction; 0 disables grid export.
  int grid = 0;

  /// FNV-1a hash of the task name and the raw config text.
  std::uint64_t hash = 0;
};

/// Parses an INI run configuration. Sections: [domain], [basis],
/// [coefficients], [task], [output]. Unknown sections or keys, malformed
/// values and incomplete task parameters raise ConfigError.
[[nodiscard]] RunConfig parse_config(const std::string& text, Task task);
[[nodiscard]] RunConfig load_config(const std::string& path, Task task);

[[nodiscard]] std::uint64_t fnv1a(const std::string& bytes);

using Cell = std::variant<std::monostate, long, double, std::string>;

/// Output table: header metadata, named columns, rows and footer metadata.
struct Table {
  std::string title;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> footer;
};

struct GridFile {
  std::size_t eigen_index = 0;
  Table table;
};

struct ComputeResult {
  Table table;
  std::vector<GridFile> grids;
};

[[nodiscard]] ComputeResult run_compute(const RunConfig& config);
[[nodiscard]] Table run_reference(const RunConfig& config);
[[nodiscard]] Table run_estimate(const RunConfig& config);
[[nodiscard]] Table run_convergence(const RunConfig& config);

/// Fixed 12-significant-digit formatting shared by CSV and JSON.
[[nodiscard]] std::string format_number(double v);

[[nodiscard]] std::string to_csv(const Table& table);
[[nodiscard]] std::string to_json(const Table& table);

/// Full command-line entry point; returns the process exit code
/// (0 success, 2 configuration error, 3 numerical failure).
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace zite::cli
