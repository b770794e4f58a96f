#include "tabgen/csv.hpp"

#include <fstream>
#include <sstream>

#include "tabgen/error.hpp"
#include "tabgen/serialize.hpp"

namespace tabgen::data {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_metadata(const Metadata& metadata) {
  std::string out = "#";
  for (const auto& [key, value] : metadata) out += " " + key + "=" + value;
  return out;
}

void parse_metadata_line(std::string_view line, Metadata& into) {
  if (!line.empty() && line.front() == '#') line.remove_prefix(1);
  std::istringstream ss{std::string(line)};
  std::string token;
  while (ss >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0) continue;
    into[token.substr(0, eq)] = token.substr(eq + 1);
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.front() == '#') {
      parse_metadata_line(line, table.metadata);
      continue;
    }
    if (trim(line).empty()) continue;
    header = split_fields(line);
    break;
  }
  if (header.empty()) throw SchemaError("missing header row", line_no, 0);

  // column_of[k] = position of canonical column k in the file
  std::array<std::size_t, kSampleDim> column_of{};
  column_of.fill(SIZE_MAX);
  std::optional<std::size_t> flag_column;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    if (name == kInDomainColumn) {
      flag_column = c;
      continue;
    }
    std::size_t k = 0;
    while (k < kSampleDim && kColumnNames[k] != name) ++k;
    if (k == kSampleDim) {
      throw SchemaError("unknown column '" + name + "'", line_no, c + 1);
    }
    if (column_of[k] != SIZE_MAX) {
      throw SchemaError("duplicate column '" + name + "'", line_no, c + 1);
    }
    column_of[k] = c;
  }
  for (std::size_t k = 0; k < kSampleDim; ++k) {
    if (column_of[k] == SIZE_MAX) {
      throw SchemaError("missing column '" + std::string(kColumnNames[k]) + "'", line_no, 0);
    }
  }
  if (flag_column) table.in_domain.emplace();

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.front() == '#') continue;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw SchemaError("expected " + std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size()),
                        line_no, 0);
    }
    std::array<double, kSampleDim> values{};
    for (std::size_t k = 0; k < kSampleDim; ++k) {
      const std::size_t c = column_of[k];
      try {
        values[k] = parse_double(trim(fields[c]));
      } catch (const Error&) {
        throw SchemaError("non-numeric cell '" + fields[c] + "' in column " +
                              std::string(kColumnNames[k]),
                          line_no, c + 1);
      }
    }
    if (flag_column) {
      const std::string flag = trim(fields[*flag_column]);
      if (flag != "0" && flag != "1") {
        throw SchemaError("in_domain must be 0 or 1", line_no, *flag_column + 1);
      }
      table.in_domain->push_back(flag == "1");
    }
    table.samples.push_back(Sample::from_array(values));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_csv(in);
}

std::vector<Sample> load_csv(const std::filesystem::path& path) {
  return read_csv(path).samples;
}

void write_csv(std::ostream& out, std::span<const Sample> samples,
               const CsvWriteOptions& options) {
  if (!options.metadata.empty()) out << format_metadata(options.metadata) << '\n';
  for (std::size_t k = 0; k < kSampleDim; ++k) {
    if (k > 0) out << ',';
    out << kColumnNames[k];
  }
  if (options.flag_in_domain) out << ',' << kInDomainColumn;
  out << '\n';
  for (const auto& s : samples) {
    const auto a = s.to_array();
    for (std::size_t k = 0; k < kSampleDim; ++k) {
      if (k > 0) out << ',';
      out << format_double(a[k]);
    }
    if (options.flag_in_domain) out << ',' << (in_domain(s.inputs) ? 1 : 0);
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, std::span<const Sample> samples,
              const CsvWriteOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(out, samples, options);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace tabgen::data
