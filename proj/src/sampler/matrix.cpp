#include "policylens/sampler/matrix.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "policylens/core/error.hpp"

namespace policylens::sampler {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

}  // namespace

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw Error(ErrorCode::DegenerateInput, "ragged matrix rows");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Matrix read_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream cells(line);
    std::vector<double> row;
    std::string cell;
    while (cells >> cell) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::IoError, path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::IoError, path.string() + ":" + std::to_string(lineno) + ": expected " +
                                          std::to_string(rows.front().size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
  return Matrix::from_rows(rows);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  out << std::setprecision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? " " : "") << r[j];
    out << '\n';
  }
}

std::vector<ManifestEntry> read_id_manifest(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    ManifestEntry e;
    e.id = line.substr(0, tab);
    if (tab == std::string::npos || e.id.empty()) {
      throw Error(ErrorCode::IoError, path.string() + ":" + std::to_string(lineno) + ": expected id<TAB>word_count");
    }
    const std::string count = line.substr(tab + 1);
    auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), e.word_count);
    if (ec != std::errc() || ptr != count.data() + count.size()) {
      throw Error(ErrorCode::IoError, path.string() + ":" + std::to_string(lineno) + ": bad word count");
    }
    out.push_back(std::move(e));
  }
  return out;
}

void write_id_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  auto out = open_out(path);
  for (const auto& e : entries) out << e.id << '\t' << e.word_count << '\n';
}

}  // namespace policylens::sampler
