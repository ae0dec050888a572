#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "iddlab/cli.hpp"

namespace iddlab::cli {

namespace {

void write_number(double v, std::string& out) {
  if (std::isnan(v)) {
    out += "\"nan\"";
  } else if (std::isinf(v)) {
    out += v > 0 ? "\"inf\"" : "\"-inf\"";
  } else {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  }
}

void write(const nlohmann::json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Numeric arrays stay on one line so curves remain readable.
      const bool flat = std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat && indent >= 0 ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        write(e, indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float:
      write_number(j.get<double>(), out);
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_report(const nlohmann::json& report, int indent) {
  std::string out;
  write(report, indent, 0, out);
  out += '\n';
  return out;
}

}  // namespace iddlab::cli
