#include "dqc1lab/io.hpp"

#include <charconv>
#include <fstream>

namespace dqc1lab::io {

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void CsvWriter::meta(const std::string& key, const std::string& value) {
  buffer_ += "# " + key + ": " + value + "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::numeric_row(const std::vector<double>& cells) {
  std::vector<std::string> formatted;
  formatted.reserve(cells.size());
  for (double c : cells) formatted.push_back(format_double(c));
  row(formatted);
}

void CsvWriter::write(const std::filesystem::path& path) const { write_text(path, buffer_); }

nlohmann::json density_matrix_to_json(const DensityMatrix& rho) {
  nlohmann::json space = nlohmann::json::array();
  for (const auto& f : rho.space().factors()) {
    space.push_back({{"label", f.label}, {"dim", f.dim}});
  }
  nlohmann::json elements = nlohmann::json::array();
  const Matrix& m = rho.elements();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      elements.push_back(std::real(m(r, c)));
      elements.push_back(std::imag(m(r, c)));
    }
  }
  return {{"space", space}, {"elements", elements}};
}

DensityMatrix density_matrix_from_json(const nlohmann::json& j) {
  std::vector<Factor> factors;
  for (const auto& f : j.at("space")) {
    factors.push_back(Factor{f.at("label").get<std::string>(), f.at("dim").get<int>()});
  }
  HilbertSpec space(std::move(factors));
  const auto& elements = j.at("elements");
  const int d = space.dim();
  if (static_cast<int>(elements.size()) != 2 * d * d) {
    throw InvalidConfig("density matrix JSON has wrong element count");
  }
  Matrix m(d, d);
  int k = 0;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      const double re = elements[static_cast<size_t>(k++)].get<double>();
      const double im = elements[static_cast<size_t>(k++)].get<double>();
      m(r, c) = Complex(re, im);
    }
  }
  return DensityMatrix(std::move(space), std::move(m));
}

nlohmann::json wigner_dataset_to_json(const tomo::WignerDataset& dataset) {
  nlohmann::json space = nlohmann::json::array();
  for (const auto& f : dataset.state_space.factors()) {
    space.push_back({{"label", f.label}, {"dim", f.dim}});
  }
  nlohmann::json beta = nlohmann::json::array();
  for (const Complex& b : dataset.beta_grid) beta.push_back({b.real(), b.imag()});
  nlohmann::json settings = nlohmann::json::array();
  for (const auto s : dataset.settings) settings.push_back(tomo::setting_name(s));

  nlohmann::json values = nlohmann::json::array();
  for (Eigen::Index s = 0; s < dataset.expectations.rows(); ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index b = 0; b < dataset.expectations.cols(); ++b) {
      row.push_back(dataset.expectations(s, b));
    }
    values.push_back(std::move(row));
  }

  nlohmann::json doc{{"space", space},
                     {"beta_grid", beta},
                     {"settings", settings},
                     {"truncation", dataset.truncation},
                     {"shots_per_point", dataset.shots_per_point},
                     {"seed", dataset.seed},
                     {"expectations", values}};
  if (dataset.has_shots()) {
    nlohmann::json shots = nlohmann::json::array();
    for (const auto& per_setting : dataset.shots) {
      nlohmann::json setting_rows = nlohmann::json::array();
      for (const auto& record : per_setting) {
        std::string ancilla(record.size(), '+');
        std::string parity(record.size(), '+');
        for (size_t k = 0; k < record.size(); ++k) {
          if (record[k].first < 0) ancilla[k] = '-';
          if (record[k].second < 0) parity[k] = '-';
        }
        setting_rows.push_back({{"ancilla", ancilla}, {"parity", parity}});
      }
      shots.push_back(std::move(setting_rows));
    }
    doc["shots"] = std::move(shots);
  }
  return doc;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
}

}  // namespace dqc1lab::io
