#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace rigidlab::cli {

/// Pretty JSON with keys sorted and every float printed with %.17g, so equal
/// values always give equal bytes. Non-finite floats become strings.
std::string dump_report(const nlohmann::json& j);

}  // namespace rigidlab::cli
