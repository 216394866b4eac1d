#include "evipath/jsonl.hpp"

namespace evipath {

void for_each_jsonl(std::istream& in,
                    const std::function<void(std::size_t, const Json&)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    Json parsed;
    try {
      parsed = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw JsonlError(line_no, "", std::string("invalid JSON: ") + e.what());
    }
    try {
      fn(line_no, parsed);
    } catch (const JsonlError&) {
      throw;
    } catch (const std::exception& e) {
      throw JsonlError(line_no, "", e.what());
    }
  }
}

const Json& require_field(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) {
    throw std::runtime_error(path + ": expected object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw std::runtime_error(path.empty() ? key + ": missing field"
                                          : path + "." + key + ": missing field");
  }
  return *it;
}

namespace {
std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}
}  // namespace

std::string require_string(const Json& obj, const std::string& key, const std::string& path) {
  const Json& value = require_field(obj, key, path);
  if (!value.is_string()) {
    throw std::runtime_error(join_path(path, key) + ": expected string");
  }
  return value.get<std::string>();
}

std::int64_t require_int(const Json& obj, const std::string& key, const std::string& path) {
  const Json& value = require_field(obj, key, path);
  if (!value.is_number_integer()) {
    throw std::runtime_error(join_path(path, key) + ": expected integer");
  }
  return value.get<std::int64_t>();
}

}  // namespace evipath
