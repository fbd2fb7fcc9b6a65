#include "featwarp/csv.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <set>

#include "featwarp/error.h"

namespace featwarp {

namespace {

bool parse_finite(const std::string& text, double& out) {
  std::size_t b = 0, e = text.size();
  while (b < e && (text[b] == ' ' || text[b] == '\t')) ++b;
  while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t')) --e;
  if (b == e) return false;
  if (text[b] == '+') ++b;
  auto [ptr, ec] = std::from_chars(text.data() + b, text.data() + e, out);
  return ec == std::errc{} && ptr == text.data() + e && std::isfinite(out);
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started)
          throw Error(ErrorCode::ParseError, "unexpected quote inside unquoted field on line " + std::to_string(line));
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::ParseError, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();

  if (records.empty()) throw Error(ErrorCode::EmptyData, "CSV input has no header");
  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size())
      throw Error(ErrorCode::ParseError, "record " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                                             " fields, header has " + std::to_string(table.header.size()));
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return parse_csv(in);
}

FeatureMatrix to_feature_matrix(const CsvTable& table) {
  Matrix values(table.rows.size(), table.header.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t c = 0; c < table.header.size(); ++c)
      if (!parse_finite(table.rows[r][c], values(r, c)))
        throw Error(ErrorCode::ParseError, "column '" + table.header[c] + "' row " + std::to_string(r + 1) +
                                               ": '" + table.rows[r][c] + "' is not a finite number");
  return FeatureMatrix(table.header, std::move(values));
}

LabeledDataset to_labeled_dataset(const CsvTable& table, const TargetSpec& spec) {
  std::size_t target_col = table.header.size();
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c] == spec.column) target_col = c;
  if (target_col == table.header.size())
    throw Error(ErrorCode::SchemaMismatch, "target column '" + spec.column + "' not found");

  CsvTable features;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (c != target_col) features.header.push_back(table.header[c]);
  features.rows.reserve(table.rows.size());

  LabeledDataset out;
  out.target_name = spec.column;
  out.task = spec.positive_label ? TaskKind::Classification : TaskKind::Regression;
  if (spec.positive_label) out.positive_label = *spec.positive_label;
  if (spec.negative_label) out.negative_label = *spec.negative_label;

  std::set<std::string> negatives;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < table.header.size(); ++c)
      if (c != target_col) row.push_back(table.rows[r][c]);
    features.rows.push_back(std::move(row));

    const std::string& label = table.rows[r][target_col];
    if (spec.positive_label) {
      if (label == *spec.positive_label) {
        out.target.push_back(1.0);
        continue;
      }
      if (spec.negative_label && label != *spec.negative_label)
        throw Error(ErrorCode::ParseError, "target value '" + label + "' is neither declared label");
      negatives.insert(label);
      out.negative_label = label;
      if (negatives.size() > 1)
        throw Error(ErrorCode::ParseError, "classification target has more than two distinct labels");
      out.target.push_back(0.0);
    } else {
      double v = 0.0;
      if (!parse_finite(label, v))
        throw Error(ErrorCode::ParseError, "target row " + std::to_string(r + 1) + ": '" + label + "' is not a number");
      out.target.push_back(v);
    }
  }
  out.features = to_feature_matrix(features);
  out.validate();
  return out;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& data) {
  write_csv_row(out, data.names());
  std::vector<std::string> fields(data.cols());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) fields[c] = format_double(data(r, c));
    write_csv_row(out, fields);
  }
}

void write_dataset_csv(std::ostream& out, const LabeledDataset& data) {
  auto header = data.features.names();
  header.push_back(data.target_name);
  write_csv_row(out, header);
  std::vector<std::string> fields(header.size());
  for (std::size_t r = 0; r < data.features.rows(); ++r) {
    for (std::size_t c = 0; c < data.features.cols(); ++c) fields[c] = format_double(data.features(r, c));
    fields.back() = data.task == TaskKind::Classification
                        ? (data.target[r] == 1.0 ? data.positive_label : data.negative_label)
                                                          : format_double(data.target[r]);
    write_csv_row(out, fields);
  }
}

}  // namespace featwarp
