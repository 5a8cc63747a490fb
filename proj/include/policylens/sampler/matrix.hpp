#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace policylens::sampler {

/// Dense row-major matrix of doubles, one row per document.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// One row per line, values separated by whitespace or commas. Throws
/// Error(IoError) for unreadable files, ragged rows or non-numeric cells.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

struct ManifestEntry {
  std::string id;
  std::size_t word_count = 0;
};

/// "id<TAB>word_count" lines aligned with matrix rows.
std::vector<ManifestEntry> read_id_manifest(const std::filesystem::path& path);
void write_id_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

}  // namespace policylens::sampler
