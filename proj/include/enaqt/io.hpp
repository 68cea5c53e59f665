#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "enaqt/lindblad.hpp"
#include "enaqt/model.hpp"

namespace enaqt::io {

/// %.17g, with "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double v);

/// Column-major numeric table written as CSV. The first line is a comment
/// carrying `header` (the resolved run config) as compact JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const nlohmann::json& header, const Table& table);

/// Reads back a file written by write_csv. Returns the header and table.
std::pair<nlohmann::json, Table> read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Writes `content` to a sibling temporary and renames it into place.
void write_text(const std::filesystem::path& path, const std::string& content);

/// One row per matrix row: index, then re_k, im_k for each column k.
Table density_table(const DensityMatrix& rho);
/// One row per matrix row: index, then one column per matrix column.
Table matrix_table(const RealMatrix& m, const std::string& prefix);

}  // namespace enaqt::io
