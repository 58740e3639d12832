#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rabi/model.hpp"

namespace rabi {

// A parsed model descriptor. For Rabi descriptors `map` converts J spectra
// to physical units; otherwise it is the identity.
struct ModelDescriptor {
  ModelSpec spec;
  std::optional<RabiParams> rabi;
  Branch branch = Branch::plus;
  SpectralMap map{};
};

ModelDescriptor model_from_json(const nlohmann::json& j);
ModelDescriptor load_model(const std::filesystem::path& path);
nlohmann::json model_to_json(const ModelDescriptor& m);

// 17 significant digits, so values round-trip exactly.
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter& cell(double x);
  CsvWriter& cell(long x);
  CsvWriter& cell(const std::string& s);
  void end_row();

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::size_t pending_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index(const std::string& name) const;
  std::vector<double> numbers(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace rabi
