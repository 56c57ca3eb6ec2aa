#include "io.hpp"

#include <fstream>
#include <sstream>

#include "attrdisam/error.hpp"

namespace attrdisam {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::ConfigInfeasible: return "ConfigInfeasible";
    case ErrorKind::IncompatibleObservation: return "IncompatibleObservation";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorKind::UnknownSession: return "UnknownSession";
    case ErrorKind::SessionDone: return "SessionDone";
    case ErrorKind::Io: return "IoError";
  }
  return "Unknown";
}

namespace detail {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::Io, "short write to " + path.string());
}

nlohmann::json parse_json(std::string_view text, std::string_view what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Schema, std::string(what) + ": " + e.what());
  }
}

}  // namespace detail
}  // namespace attrdisam
