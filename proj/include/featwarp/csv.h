#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "featwarp/data.h"

namespace featwarp {

// RFC 4180 table: first row is the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

// Every column parsed as a finite real ('.' decimal separator).
FeatureMatrix to_feature_matrix(const CsvTable& table);

struct TargetSpec {
  std::string column;
  // Present for classification: rows equal to this label are positive.
  std::optional<std::string> positive_label;
  // Optional explicit negative label; without it any second value is negative.
  std::optional<std::string> negative_label;
};

// Target column named in `spec`; all remaining columns become features.
LabeledDataset to_labeled_dataset(const CsvTable& table, const TargetSpec& spec);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);
std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);
void write_feature_csv(std::ostream& out, const FeatureMatrix& data);
void write_dataset_csv(std::ostream& out, const LabeledDataset& data);

}  // namespace featwarp
