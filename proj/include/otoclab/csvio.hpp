#pragma once
// Minimal CSV emission/ingestion for the experiment runner. Numbers are
// written with 17 significant digits so a run's output re-parses to the
// exact same doubles; reruns with the same config are byte-identical.

#include <fstream>
#include <string>
#include <vector>

namespace otoclab::io {

std::string g17(double v);  // %.17g

class CsvWriter {
 public:
  // opens the file and writes the header row; throws std::runtime_error on
  // failure (maps to the I/O exit code upstream)
  CsvWriter(const std::string& path, std::vector<std::string> columns);
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  CsvWriter& cell(double v);
  CsvWriter& cell(int v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(unsigned v);
  CsvWriter& cell(const std::string& v);
  void endrow();  // throws std::logic_error if the cell count mismatches the header
  void close();   // flush and verify stream health; throws std::runtime_error

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::vector<std::string> columns_;
  std::string row_;
  std::size_t cells_in_row_ = 0;
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // raw cells

  bool has_column(const std::string& name) const;
  // column values parsed as doubles; throws std::runtime_error naming the
  // first offending row if a cell is not numeric
  std::vector<double> numeric(const std::string& name) const;
  std::size_t size() const { return rows.size(); }
};

// throws std::runtime_error on unreadable file, missing header, or ragged rows
CsvTable read_csv(const std::string& path);

}  // namespace otoclab::io
