// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>
#include "error.hpp"

namespace hyperlim
{

/// Flat key/value run configuration. Lines look like `time.cfl = 0.5`;
/// `#` starts a comment; keys are dotted paths with no nesting semantics
/// beyond the naming convention. Lookups record usage so a run can reject
/// configs containing unknown (e.g. misspelled) keys.
class Config
{
public:
  static Config parse_string(const std::string &text, const std::string &origin = "<string>")
  {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
      lineno++;
      std::string::size_type hash = line.find('#');
      if (hash != std::string::npos)
      {
        line.erase(hash);
      }
      std::string trimmed = trim(line);
      if (trimmed.empty())
      {
        continue;
      }
      std::string::size_type eq = trimmed.find('=');
      if (eq == std::string::npos)
      {
        throw ConfigError(detail::format_msg("%s:%d: expected 'key = value', got '%s'", origin.c_str(),
                                             lineno, trimmed.c_str()));
      }
      std::string key = trim(trimmed.substr(0, eq));
      std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
      {
        throw ConfigError(detail::format_msg("%s:%d: empty key", origin.c_str(), lineno));
      }
      auto [it, inserted] = cfg.kv_.emplace(key, value);
      if (!inserted)
      {
        throw ConfigError(detail::format_msg("%s:%d: duplicate key '%s' (first set at line %d)",
                                             origin.c_str(), lineno, key.c_str(), cfg.line_.at(key)));
      }
      cfg.line_[key] = lineno;
    }
    return cfg;
  }

  static Config parse_file(const std::string &path)
  {
    std::ifstream in(path);
    if (!in)
    {
      throw ConfigError(detail::format_msg("cannot open config file '%s'", path.c_str()));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
  }

  bool has(const std::string &key) const
  {
    if (kv_.count(key))
    {
      used_.insert(key);
      return true;
    }
    return false;
  }

  std::string get_string(const std::string &key, const std::string &def) const
  {
    auto it = kv_.find(key);
    if (it == kv_.end())
    {
      return def;
    }
    used_.insert(key);
    return it->second;
  }

  std::string get_string_required(const std::string &key) const
  {
    auto it = kv_.find(key);
    if (it == kv_.end())
    {
      throw ConfigError(detail::format_msg("%s: missing required key '%s'", origin_.c_str(), key.c_str()));
    }
    used_.insert(key);
    return it->second;
  }

  double get_double(const std::string &key, double def) const
  {
    auto it = kv_.find(key);
    if (it == kv_.end())
    {
      return def;
    }
    used_.insert(key);
    return to_double(key, it->second);
  }

  long get_int(const std::string &key, long def) const
  {
    auto it = kv_.find(key);
    if (it == kv_.end())
    {
      return def;
    }
    used_.insert(key);
    const std::string &v = it->second;
    char *end = nullptr;
    long out = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
    {
      throw_bad_value(key, v, "an integer");
    }
    return out;
  }

  bool get_bool(const std::string &key, bool def) const
  {
    auto it = kv_.find(key);
    if (it == kv_.end())
    {
      return def;
    }
    used_.insert(key);
    const std::string &v = it->second;
    if (v == "true" || v == "on" || v == "1" || v == "yes")
    {
      return true;
    }
    if (v == "false" || v == "off" || v == "0" || v == "no")
    {
      return false;
    }
    throw_bad_value(key, v, "a boolean");
    return def;
  }

  /// Keys present in the file but never queried; a run treats these as errors
  /// so typos cannot silently fall back to defaults.
  std::vector<std::string> unused_keys() const
  {
    std::vector<std::string> out;
    for (const auto &[k, v] : kv_)
    {
      if (!used_.count(k))
      {
        out.push_back(k);
      }
    }
    return out;
  }

  void reject_unused() const
  {
    std::vector<std::string> stray = unused_keys();
    if (!stray.empty())
    {
      std::string joined;
      for (const auto &k : stray)
      {
        joined += (joined.empty() ? "" : ", ") + k;
      }
      throw ConfigError(detail::format_msg("%s: unknown key(s): %s", origin_.c_str(), joined.c_str()));
    }
  }

  const std::string &origin() const { return origin_; }

private:
  double to_double(const std::string &key, const std::string &v) const
  {
    char *end = nullptr;
    double out = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
    {
      throw_bad_value(key, v, "a number");
    }
    return out;
  }

  [[noreturn]] void throw_bad_value(const std::string &key, const std::string &v,
                                    const char *expected) const
  {
    throw ConfigError(detail::format_msg("%s:%d: key '%s' expects %s, got '%s'", origin_.c_str(),
                                         line_.count(key) ? line_.at(key) : 0, key.c_str(), expected,
                                         v.c_str()));
  }

  static std::string trim(const std::string &s)
  {
    std::string::size_type b = 0;
    std::string::size_type e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
    {
      b++;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
    {
      e--;
    }
    return s.substr(b, e - b);
  }

  std::string origin_;
  std::map<std::string, std::string> kv_;
  std::map<std::string, int> line_;
  mutable std::set<std::string> used_;
};

}  // namespace hyperlim
