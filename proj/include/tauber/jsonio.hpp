// SPDX-License-Identifier: Apache-2.0
//
// Minimal JSON emitter with deterministic, insertion-ordered objects and all
// doubles printed at 17 significant digits (lossless for IEEE doubles).
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace tauber {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class JsonValue {
 public:
  using Array = std::vector<JsonValue>;
  using Object = std::vector<std::pair<std::string, JsonValue>>;

  JsonValue() : v_(nullptr) {}
  JsonValue(std::nullptr_t) : v_(nullptr) {}
  JsonValue(bool b) : v_(b) {}
  JsonValue(double d) : v_(d) {}
  JsonValue(int i) : v_(static_cast<std::int64_t>(i)) {}
  JsonValue(std::int64_t i) : v_(i) {}
  JsonValue(std::uint64_t u) : v_(static_cast<std::int64_t>(u)) {}
  JsonValue(const char* s) : v_(std::string(s)) {}
  JsonValue(std::string s) : v_(std::move(s)) {}
  JsonValue(Array a) : v_(std::move(a)) {}

  static JsonValue object() {
    JsonValue v;
    v.v_ = Object{};
    return v;
  }
  static JsonValue array() {
    JsonValue v;
    v.v_ = Array{};
    return v;
  }

  JsonValue& set(std::string key, JsonValue value) {
    std::get<Object>(v_).emplace_back(std::move(key), std::move(value));
    return *this;
  }

  JsonValue& push(JsonValue value) {
    std::get<Array>(v_).push_back(std::move(value));
    return *this;
  }

  std::string dump(int indent = -1) const {
    std::string out;
    write(out, indent, 0);
    return out;
  }

 private:
  static void write_escaped(std::string& out, std::string_view s) {
    out += '"';
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out += buf;
          } else {
            out += c;
          }
      }
    }
    out += '"';
  }

  void newline(std::string& out, int indent, int depth) const {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent) * depth, ' ');
  }

  void write(std::string& out, int indent, int depth) const {
    if (std::holds_alternative<std::nullptr_t>(v_)) {
      out += "null";
    } else if (auto* b = std::get_if<bool>(&v_)) {
      out += *b ? "true" : "false";
    } else if (auto* i = std::get_if<std::int64_t>(&v_)) {
      out += std::to_string(*i);
    } else if (auto* d = std::get_if<double>(&v_)) {
      out += format_double(*d);
    } else if (auto* s = std::get_if<std::string>(&v_)) {
      write_escaped(out, *s);
    } else if (auto* a = std::get_if<Array>(&v_)) {
      out += '[';
      for (std::size_t k = 0; k < a->size(); ++k) {
        if (k) out += ',';
        newline(out, indent, depth + 1);
        (*a)[k].write(out, indent, depth + 1);
      }
      if (!a->empty()) newline(out, indent, depth);
      out += ']';
    } else {
      const auto& obj = std::get<Object>(v_);
      out += '{';
      for (std::size_t k = 0; k < obj.size(); ++k) {
        if (k) out += ',';
        newline(out, indent, depth + 1);
        write_escaped(out, obj[k].first);
        out += indent < 0 ? ":" : ": ";
        obj[k].second.write(out, indent, depth + 1);
      }
      if (!obj.empty()) newline(out, indent, depth);
      out += '}';
    }
  }

  std::variant<std::nullptr_t, bool, std::int64_t, double, std::string, Array, Object> v_;
};

}  // namespace tauber
