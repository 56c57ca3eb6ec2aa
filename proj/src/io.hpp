#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "attrdisam/error.hpp"

namespace attrdisam::detail {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Parses JSON, mapping syntax errors onto Error{Schema}.
nlohmann::json parse_json(std::string_view text, std::string_view what);

/// Runs `fn`, rethrowing nlohmann type/range errors as Error{Schema}.
template <class Fn>
auto with_schema_errors(std::string_view what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string(what) + ": " + e.what());
  }
}

}  // namespace attrdisam::detail
