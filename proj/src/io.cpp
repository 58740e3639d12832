#include "rabi/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "rabi/errors.hpp"

namespace rabi {

namespace {

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw DomainError(std::string("model descriptor: missing numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

ModelDescriptor parse_descriptor(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("model descriptor must be a JSON object");
  ModelDescriptor out;
  if (j.contains("rabi")) {
    const auto& r = j.at("rabi");
    RabiParams p{number_field(r, "omega"), number_field(r, "E"), number_field(r, "g"),
                 number_field(r, "hbar")};
    const std::string sign = j.value("sign", "+");
    if (sign != "+" && sign != "-") throw DomainError("model descriptor: sign must be '+' or '-'");
    const Branch b = sign == "+" ? Branch::plus : Branch::minus;
    const auto rj = rabi_to_jacobi(p, b);
    out.spec = rj.spec;
    out.rabi = p;
    out.branch = b;
    out.map = rj.map;
    return out;
  }
  const std::string mode = j.value("mode", "");
  const double a1 = number_field(j, "a1");
  if (mode == "H0") {
    double rho = 0.0;
    if (j.contains("rho")) {
      rho = number_field(j, "rho");
    } else if (j.contains("v")) {
      const auto v = j.at("v").get<std::vector<double>>();
      if (v.size() != 2 || v[0] != -v[1]) {
        throw DomainError("model descriptor: H0 needs v = [-rho, rho]");
      }
      rho = v[1];
    }
    if (j.contains("gamma") && number_field(j, "gamma") != 0.5) {
      throw DomainError("model descriptor: H0 fixes gamma = 0.5");
    }
    if (j.contains("a1prime") && number_field(j, "a1prime") != 0.0) {
      throw DomainError("model descriptor: H0 fixes a1prime = 0");
    }
    out.spec = ModelSpec::h0(a1, rho);
    return out;
  }
  if (mode == "H12") {
    if (!j.contains("v")) throw DomainError("model descriptor: H12 needs 'v'");
    const auto v = j.at("v").get<std::vector<double>>();
    if (j.contains("N") && j.at("N").get<long>() != static_cast<long>(v.size())) {
      throw DomainError("model descriptor: N does not match length of v");
    }
    OffDiagonalProfile prof{a1, number_field(j, "gamma"), j.value("a1prime", 0.0)};
    out.spec = ModelSpec::h12(prof, PeriodicPotential::from_values(v));
    return out;
  }
  throw DomainError("model descriptor: mode must be H0 or H12, or give a 'rabi' block");
}

}  // namespace

ModelDescriptor model_from_json(const nlohmann::json& j) {
  try {
    return parse_descriptor(j);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("model descriptor: ") + e.what());
  }
}

ModelDescriptor load_model(const std::filesystem::path& path) {
  return model_from_json(read_json(path));
}

nlohmann::json model_to_json(const ModelDescriptor& m) {
  nlohmann::json j;
  if (m.rabi) {
    j["rabi"] = {{"omega", m.rabi->omega}, {"E", m.rabi->E}, {"g", m.rabi->g},
                 {"hbar", m.rabi->hbar}};
    j["sign"] = m.branch == Branch::plus ? "+" : "-";
  }
  const auto& s = m.spec;
  j["mode"] = to_string(s.mode());
  j["a1"] = s.offdiag().a1;
  j["gamma"] = s.offdiag().gamma;
  j["a1prime"] = s.offdiag().a1prime;
  j["N"] = s.period();
  j["v"] = s.potential().values();
  return j;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw DomainError("cannot open output file " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  out_ << (pending_ ? "," : "") << s;
  ++pending_;
  return *this;
}

CsvWriter& CsvWriter::cell(double x) { return cell(format_double(x)); }
CsvWriter& CsvWriter::cell(long x) { return cell(std::to_string(x)); }

void CsvWriter::end_row() {
  if (pending_ != columns_) throw std::logic_error("CSV row width mismatch");
  out_ << '\n';
  pending_ = 0;
}

std::optional<std::size_t> CsvTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvTable::index(const std::string& name) const {
  auto i = find(name);
  if (!i) throw DomainError("CSV is missing column '" + name + "'");
  return *i;
}

std::vector<double> CsvTable::numbers(const std::string& name) const {
  const std::size_t c = index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(r.at(c), &used));
    } catch (const std::exception&) {
      throw DomainError("CSV column '" + name + "' holds a non-numeric value");
    }
  }
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open CSV file " + path.string());
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw DomainError("CSV row width does not match header in " + path.string());
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw DomainError("CSV file is empty: " + path.string());
  return t;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open JSON file " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open output file " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace rabi
