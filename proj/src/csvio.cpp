#include "otoclab/csvio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace otoclab::io {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> columns)
    : path_(path), columns_(std::move(columns)), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open '" + path_ + "' for writing");
  std::string header;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) header += ',';
    header += columns_[i];
  }
  header += '\n';
  out_.write(header.data(), static_cast<std::streamsize>(header.size()));
}

CsvWriter& CsvWriter::cell(double v) { return cell(g17(v)); }
CsvWriter& CsvWriter::cell(int v) { return cell(std::to_string(v)); }
CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }
CsvWriter& CsvWriter::cell(unsigned v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (cells_in_row_) row_ += ',';
  row_ += v;
  ++cells_in_row_;
  return *this;
}

void CsvWriter::endrow() {
  if (cells_in_row_ != columns_.size())
    throw std::logic_error("csv row has " + std::to_string(cells_in_row_) + " cells, header has " +
                           std::to_string(columns_.size()) + " ('" + path_ + "')");
  row_ += '\n';
  out_.write(row_.data(), static_cast<std::streamsize>(row_.size()));
  row_.clear();
  cells_in_row_ = 0;
}

void CsvWriter::close() {
  if (!out_.is_open()) return;
  out_.flush();
  const bool ok = static_cast<bool>(out_);
  out_.close();
  if (!ok) throw std::runtime_error("write failed for '" + path_ + "'");
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& c : columns)
    if (c == name) return true;
  return false;
}

std::vector<double> CsvTable::numeric(const std::string& name) const {
  std::size_t col = columns.size();
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) col = i;
  if (col == columns.size()) throw std::runtime_error("csv has no column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string& cell = rows[r][col];
    const char* s = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || (end && *end != '\0'))
      throw std::runtime_error("csv cell '" + cell + "' in column '" + name + "', row " +
                               std::to_string(r + 1) + " is not numeric");
    out.push_back(v);
  }
  return out;
}

namespace {
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}
}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open csv '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw std::runtime_error("csv '" + path + "' has no header row");
  t.columns = split_line(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != t.columns.size())
      throw std::runtime_error("csv '" + path + "' line " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(t.columns.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace otoclab::io
