#include "report_json.hpp"

#include <cmath>
#include <cstdio>

namespace rigidlab::cli {

namespace {

void write(const nlohmann::json& j, int depth, std::string& out) {
  const std::string pad(2 * (depth + 1), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      // nlohmann::json keeps object keys in a std::map, so iteration is sorted.
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + nlohmann::json(it.key()).dump() + ": ";
        write(it.value(), depth + 1, out);
      }
      out += "\n" + std::string(2 * depth, ' ') + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& v : j) scalars = scalars && !v.is_structured();
      out += scalars ? "[" : "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += scalars ? ", " : ",\n";
        if (!scalars) out += pad;
        write(j[i], depth + 1, out);
      }
      out += scalars ? "]" : "\n" + std::string(2 * depth, ' ') + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += std::isnan(x) ? "\"nan\"" : (x > 0 ? "\"inf\"" : "\"-inf\"");
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_report(const nlohmann::json& j) {
  std::string out;
  write(j, 0, out);
  out += "\n";
  return out;
}

}  // namespace rigidlab::cli
