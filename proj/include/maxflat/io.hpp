#pragma once

#include <initializer_list>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxflat/design.hpp"

namespace maxflat {

using Json = nlohmann::ordered_json;

/// Throws ValidationError naming the first key of `j` not in `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

[[nodiscard]] Json spec_to_json(const DesignSpec& spec);
/// Missing keys keep their defaults; unknown keys are rejected.
[[nodiscard]] DesignSpec spec_from_json(const Json& j);

[[nodiscard]] Json design_to_json(const FilterbankDesign& design);
/// Restores a design exactly as written, without re-solving.
[[nodiscard]] FilterbankDesign design_from_json(const Json& j);

[[nodiscard]] Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// 17 significant digits, '.' separator regardless of locale.
[[nodiscard]] std::string format_number(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<double>& row);
  [[nodiscard]] std::string str() const;

 private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace maxflat
