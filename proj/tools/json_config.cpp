#include "json_config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gap/error.hpp"

namespace gap::cli {

namespace {

std::string scalar(const nlohmann::ordered_json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return v.dump();
  throw UsageError("config key '" + key + "' has an unsupported value");
}

void append(std::vector<std::string>& args, const std::string& key, const nlohmann::ordered_json& v) {
  const std::string flag = "--" + key;
  if (v.is_boolean()) {
    if (v.get<bool>()) args.push_back(flag);
  } else if (v.is_array()) {
    for (const auto& item : v) {
      args.push_back(flag);
      args.push_back(scalar(item, key));
    }
  } else if (!v.is_null()) {
    args.push_back(flag);
    args.push_back(scalar(v, key));
  }
}

}  // namespace

std::vector<std::string> config_text_to_args(const std::string& text, const std::string& subcommand) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : j.items()) {
    if (key == "config") throw UsageError("config files cannot nest --config");
    if (value.is_object()) continue;
    append(args, key, value);
  }
  if (auto it = j.find(subcommand); it != j.end() && it->is_object())
    for (const auto& [key, value] : it->items()) append(args, key, value);
  return args;
}

std::vector<std::string> config_to_args(const std::string& path, const std::string& subcommand) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return config_text_to_args(ss.str(), subcommand);
}

}  // namespace gap::cli
