#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "iddlab/cli.hpp"
#include "iddlab/errors.hpp"

namespace iddlab::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

Samples parse_samples(std::istream& in) {
  Samples s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    // from_chars rejects a leading '+'; accept it as a decimal sign.
    const auto body = text.front() == '+' ? text.substr(1) : text;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || ptr != body.data() + body.size() || !std::isfinite(v))
      throw InputError("line " + std::to_string(lineno) + ": not a finite decimal number: '" + std::string(text) + "'");
    s.values.push_back(v);
  }
  if (s.values.empty()) throw InputError("sample file contains no values");
  const double n = static_cast<double>(s.values.size());
  for (double v : s.values) s.mean += v;
  s.mean /= n;
  for (double v : s.values) s.variance += (v - s.mean) * (v - s.mean);
  s.variance /= n;
  return s;
}

Samples ingest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sample file: " + path);
  return parse_samples(in);
}

}  // namespace iddlab::cli
