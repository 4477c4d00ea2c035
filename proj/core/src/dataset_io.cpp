#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ddt/domain.hpp"
#include "ddt/error.hpp"

namespace ddt {

namespace {

using Table = std::vector<std::vector<std::string>>;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// One CSV record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_record(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw DataError("line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(was_quoted ? field : trim(field));
  return fields;
}

std::pair<std::vector<std::string>, Table> read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<std::string> header;
  Table rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_record(line, line_no);
    if (header.empty()) {
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  if (header.empty()) throw DataError("'" + path.string() + "' is empty");
  return {std::move(header), std::move(rows)};
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool numeric_column(const Table& rows, std::size_t col) {
  return std::all_of(rows.begin(), rows.end(), [&](const auto& r) { return parse_number(r[col]).has_value(); });
}

std::vector<std::string> sorted_levels(const Table& rows, std::size_t col) {
  std::set<std::string> levels;
  for (const auto& r : rows) levels.insert(r[col]);
  return {levels.begin(), levels.end()};
}

CovariateSchema infer_schema(const std::vector<std::string>& header, const Table& rows,
                             const LoadOptions& options) {
  std::vector<Covariate> covariates;
  const std::size_t p = header.size() - 1;
  for (std::size_t j = 0; j < p; ++j) {
    if (numeric_column(rows, j)) {
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& r : rows) {
        const double v = *parse_number(r[j]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
      } else {
        const double pad = options.domain_margin * (hi - lo);
        lo -= pad;
        hi += pad;
      }
      covariates.push_back({header[j], ContinuousDomain{lo, hi}});
    } else {
      auto levels = sorted_levels(rows, j);
      if (levels.size() < 2) throw DataError("column '" + header[j] + "' has a single level");
      covariates.push_back({header[j], CategoricalDomain{std::move(levels)}});
    }
  }
  ResponseKind response;
  const bool numeric = numeric_column(rows, p);
  response.type = options.response_type.value_or(numeric ? ResponseType::continuous : ResponseType::categorical);
  if (response.is_categorical()) {
    response.classes = sorted_levels(rows, p);
  } else if (!numeric) {
    throw DataError("response column '" + header[p] + "' is not numeric");
  }
  return CovariateSchema(std::move(covariates), std::move(response));
}

// Column index in the file for each schema covariate.
std::vector<std::size_t> match_columns(const std::vector<std::string>& header, const CovariateSchema& schema) {
  std::vector<std::size_t> index;
  for (const auto& c : schema.covariates()) {
    const auto it = std::find(header.begin(), header.end(), c.name);
    if (it == header.end()) throw DataError("missing column '" + c.name + "'");
    index.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  return index;
}

double parse_cell(const CovariateSchema& schema, std::size_t j, const std::string& cell, std::size_t row) {
  if (schema[j].is_continuous()) {
    const auto v = parse_number(cell);
    if (!v) throw DataError("row " + std::to_string(row + 1) + ": '" + cell + "' is not a number");
    return *v;
  }
  return static_cast<double>(schema.level_code(j, cell));
}

RowMatrix parse_rows(const Table& rows, const CovariateSchema& schema, const std::vector<std::size_t>& columns) {
  RowMatrix x(rows.size(), schema.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < schema.size(); ++j) x(i, j) = parse_cell(schema, j, rows[i][columns[j]], i);
  }
  return x;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::pair<CovariateSchema, Dataset> load_dataset(const std::filesystem::path& path,
                                                 const std::optional<CovariateSchema>& schema_hint,
                                                 const LoadOptions& options) {
  auto [header, rows] = read_table(path);
  if (rows.empty()) throw DataError("'" + path.string() + "' has no data rows");
  if (header.size() < 2) throw DataError("need at least one covariate and a response column");

  CovariateSchema schema = schema_hint ? *schema_hint : infer_schema(header, rows, options);
  const auto columns = match_columns(header, schema);
  const std::size_t response_col = header.size() - 1;
  if (std::find(columns.begin(), columns.end(), response_col) != columns.end()) {
    throw DataError("last column must hold the response");
  }

  Dataset data;
  data.provenance = Provenance::observed;
  data.x = parse_rows(rows, schema, columns);
  data.y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& cell = rows[i][response_col];
    if (schema.response().is_categorical()) {
      data.y.push_back(static_cast<double>(schema.class_code(cell)));
    } else {
      const auto v = parse_number(cell);
      if (!v) throw DataError("row " + std::to_string(i + 1) + ": response '" + cell + "' is not a number");
      data.y.push_back(*v);
    }
  }
  data.validate(schema);
  return {std::move(schema), std::move(data)};
}

RowMatrix load_rows(const std::filesystem::path& path, const CovariateSchema& schema) {
  auto [header, rows] = read_table(path);
  const auto columns = match_columns(header, schema);
  RowMatrix x = parse_rows(rows, schema, columns);
  const Region domain = Region::full(schema);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (!domain.contains(x.row(i))) throw DataError("row " + std::to_string(i + 1) + " lies outside the schema domain");
  }
  return x;
}

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_dataset(const std::filesystem::path& path, const CovariateSchema& schema, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (const auto& c : schema.covariates()) out << quote_if_needed(c.name) << ',';
  out << "y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < schema.size(); ++j) {
      if (schema[j].is_continuous()) {
        out << shortest(data.x(i, j));
      } else {
        out << quote_if_needed(schema[j].categorical().levels[static_cast<std::size_t>(data.x(i, j))]);
      }
      out << ',';
    }
    if (schema.response().is_categorical()) {
      out << quote_if_needed(schema.format_response(data.y[i]));
    } else {
      out << shortest(data.y[i]);
    }
    out << '\n';
  }
}

}  // namespace ddt
