#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dqc1lab/matqm.hpp"
#include "dqc1lab/tomo.hpp"

namespace dqc1lab::io {

/// Shortest round-trip decimal representation; locale-independent, '.'
/// decimal point. Keeps rerun outputs byte-identical.
std::string format_double(double value);

/// CSV with '# key: value' metadata lines, LF line endings.
class CsvWriter {
 public:
  void meta(const std::string& key, const std::string& value);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  void numeric_row(const std::vector<double>& cells);

  const std::string& str() const { return buffer_; }
  void write(const std::filesystem::path& path) const;

 private:
  std::string buffer_;
};

/// Density matrix as {"space": [...], "elements": [re, im, re, im, ...]}
/// with elements flattened row-major.
nlohmann::json density_matrix_to_json(const DensityMatrix& rho);
DensityMatrix density_matrix_from_json(const nlohmann::json& j);

/// Full dataset, including raw shot records when present. Each point's
/// record is encoded as two '+'/'-' strings ("ancilla", "parity"), one
/// character per shot.
nlohmann::json wigner_dataset_to_json(const tomo::WignerDataset& dataset);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace dqc1lab::io
