#pragma once
// Line-oriented JSON helpers. Every parse error carries the 1-based line
// number and a dotted field path so ingestion failures point at the exact
// offending record.

#include <cstdint>
#include <functional>
#include <istream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace evipath {

using Json = nlohmann::json;

class JsonlError : public std::runtime_error {
 public:
  JsonlError(std::size_t line, const std::string& field, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) +
                           (field.empty() ? "" : ": " + field) + ": " + what),
        line_(line),
        field_(field) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Calls fn(line_number, parsed_json) for every non-blank line. Parse failures
// and exceptions thrown by fn are rethrown as JsonlError with the line number.
void for_each_jsonl(std::istream& in,
                    const std::function<void(std::size_t, const Json&)>& fn);

// Field accessors that throw with a dotted path on missing/mistyped fields.
const Json& require_field(const Json& obj, const std::string& key, const std::string& path);
std::string require_string(const Json& obj, const std::string& key, const std::string& path);
std::int64_t require_int(const Json& obj, const std::string& key, const std::string& path);

}  // namespace evipath
