#include "mr/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "mr/errors.hpp"

namespace mr {

namespace {

void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

nlohmann::json parse_value(const std::string& s, std::size_t& i);

nlohmann::json parse_array(const std::string& s, std::size_t& i) {
  nlohmann::json arr = nlohmann::json::array();
  ++i;  // '['
  for (;;) {
    skip_ws(s, i);
    if (i >= s.size()) throw Error("toml: unterminated array");
    if (s[i] == ']') {
      ++i;
      return arr;
    }
    arr.push_back(parse_value(s, i));
    skip_ws(s, i);
    if (i < s.size() && s[i] == ',') ++i;
  }
}

nlohmann::json parse_value(const std::string& s, std::size_t& i) {
  skip_ws(s, i);
  if (i >= s.size()) throw Error("toml: missing value");
  const char c = s[i];
  if (c == '[') return parse_array(s, i);
  if (c == '"') {
    std::string out;
    ++i;
    while (i < s.size() && s[i] != '"') {
      if (s[i] == '\\' && i + 1 < s.size()) ++i;
      out += s[i++];
    }
    if (i >= s.size()) throw Error("toml: unterminated string");
    ++i;
    return out;
  }
  std::size_t start = i;
  while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '#') ++i;
  std::string token = s.substr(start, i - start);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t')) token.pop_back();
  if (token == "true") return true;
  if (token == "false") return false;
  if (token.find_first_of(".eEnN") != std::string::npos &&
      token.find("inf") == std::string::npos) {
    try {
      std::size_t used = 0;
      const double d = std::stod(token, &used);
      if (used == token.size()) return d;
    } catch (...) {
    }
  }
  try {
    std::size_t used = 0;
    const long long v = std::stoll(token, &used);
    if (used == token.size()) return v;
  } catch (...) {
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(token, &used);
    if (used == token.size()) return d;
  } catch (...) {
  }
  throw Error("toml: cannot parse value '" + token + "'");
}

}  // namespace

nlohmann::json parse_toml(const std::string& text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* section = &root;
  std::istringstream lines(text);
  std::string line;
  long lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    std::size_t i = 0;
    skip_ws(line, i);
    if (i >= line.size() || line[i] == '#') continue;
    if (line[i] == '[') {
      const auto close = line.find(']', i);
      if (close == std::string::npos) throw Error("toml: bad section at line " + std::to_string(lineno));
      std::string name = line.substr(i + 1, close - i - 1);
      section = &root;
      std::size_t pos = 0;
      while (pos != std::string::npos) {
        const auto dot = name.find('.', pos);
        const std::string part =
            name.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        section = &((*section)[part]);
        if (!section->is_object()) *section = nlohmann::json::object();
        pos = dot == std::string::npos ? std::string::npos : dot + 1;
      }
      continue;
    }
    const auto eq = line.find('=', i);
    if (eq == std::string::npos)
      throw Error("toml: expected key = value at line " + std::to_string(lineno));
    std::string key = line.substr(i, eq - i);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::size_t vi = eq + 1;
    (*section)[key] = parse_value(line, vi);
  }
  return root;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml") return parse_toml(buf.str());
  return nlohmann::json::parse(buf.str());
}

}  // namespace mr
