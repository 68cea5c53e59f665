#include "enaqt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "enaqt/errors.hpp"

namespace enaqt::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericalError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw NumericalError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_csv(const std::filesystem::path& path, const nlohmann::json& header, const Table& table) {
  std::ostringstream os;
  os << "# " << header.dump() << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw InvalidArgument("csv row width does not match header");
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_double(row[c]);
    os << '\n';
  }
  write_text(path, os.str());
}

std::pair<nlohmann::json, Table> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::string line;
  nlohmann::json header;
  Table table;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw InvalidArgument(path.string() + ": missing header");
  header = nlohmann::json::parse(line.substr(2));
  if (!std::getline(in, line)) throw InvalidArgument(path.string() + ": missing column line");
  {
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) table.columns.push_back(cell);
  }
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != table.columns.size()) throw InvalidArgument(path.string() + ": ragged row");
    table.rows.push_back(std::move(row));
  }
  return {std::move(header), std::move(table)};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

Table density_table(const DensityMatrix& rho) {
  const auto n = rho.rho.rows();
  Table t;
  t.columns.push_back("row");
  for (Eigen::Index k = 0; k < n; ++k) {
    t.columns.push_back("re_" + std::to_string(k + 1));
    t.columns.push_back("im_" + std::to_string(k + 1));
  }
  for (Eigen::Index m = 0; m < n; ++m) {
    std::vector<double> row{static_cast<double>(m + 1)};
    for (Eigen::Index k = 0; k < n; ++k) {
      row.push_back(rho.rho(m, k).real());
      row.push_back(rho.rho(m, k).imag());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table matrix_table(const RealMatrix& m, const std::string& prefix) {
  Table t;
  t.columns.push_back("row");
  for (Eigen::Index k = 0; k < m.cols(); ++k) t.columns.push_back(prefix + std::to_string(k + 1));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row{static_cast<double>(r + 1)};
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(r, k));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace enaqt::io
