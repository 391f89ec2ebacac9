#pragma once

#include "penpls/gam.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace penpls {

inline constexpr std::string_view kModelFormat = "penpls-model-v1";

struct Dataset {
  std::vector<std::string> names;  // predictor columns, file order
  std::string response;            // empty when the file has no response column
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::uint64_t checksum = 0;  // FNV-1a of the file bytes

  int rows() const { return static_cast<int>(X.rows()); }
};

// Comma-delimited file with a header row. Every cell must parse as a finite
// number; offending rows are reported by data-row number (1-based, header
// excluded) and column name. The response column is split off from the
// predictors. Throws DataError on any problem.
Dataset ingest(const std::filesystem::path& path, const std::string& responseColumn);

// Like ingest, but the response column is optional: it is used when present
// and the dataset has an empty y otherwise. minRows defaults to 1.
Dataset ingest_optional_response(const std::filesystem::path& path, const std::string& responseColumn,
                                 int minRows = 1);

// Reorders the predictor columns to match expected. Throws DataError listing
// missing and extra columns if the name sets differ.
Eigen::MatrixXd align_columns(const Dataset& data, const std::vector<std::string>& expected);

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXd& rows);

// Shortest decimal that reads back to the same double ('.' separator).
std::string format_double(double v);
// Fixed 17 significant digits.
std::string format_double17(double v);
// Locale-independent parse of a complete token; nullopt if it is not a finite number.
std::optional<double> parse_double(std::string_view s);

std::uint64_t fnv1a(std::string_view bytes);

struct ModelFile {
  GamModel model;
  std::vector<std::string> names;
  std::string response;
  std::uint64_t datasetChecksum = 0;
  std::string timestamp;  // ISO 8601 UTC
};

void save_model(std::ostream& out, const ModelFile& file);
void save_model(const std::filesystem::path& path, const ModelFile& file);
// Throws DataError on an unknown format tag or malformed content.
ModelFile load_model(std::istream& in);
ModelFile load_model(const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace penpls
