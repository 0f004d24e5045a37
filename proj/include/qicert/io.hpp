#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "qicert/certifier.hpp"
#include "qicert/protocol.hpp"

namespace qicert {

inline constexpr const char* kStrategySchema = "qicert.strategy/1";
inline constexpr const char* kRecordSchema = "qicert.record/1";
inline constexpr const char* kReportSchema = "qicert.report/1";

/// Malformed input; the message starts with the offending field path.
class ParseError : public Error {
 public:
  using Error::Error;
};

nlohmann::json matrix_to_json(const ComplexMatrix& m);
/// `path` prefixes error messages, e.g. "matrices[2]".
ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json strategy_to_json(const Strategy& s);
/// Parses and validates; throws ParseError (structure) or
/// PreconditionError / DimensionError (physics).
Strategy strategy_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const CorrelationRecord& r);

struct Provenance {
  std::string input_digest;  // "fnv1a64:<16 hex digits>"
  std::uint64_t seed = 0;
  double bell_tolerance = tol::kIdentity;
};

nlohmann::json report_to_json(const CertificationReport& r, const Provenance& p);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a64_hex(const std::string& bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

Strategy load_strategy(const std::filesystem::path& path);
void save_strategy(const std::filesystem::path& path, const Strategy& s);

}  // namespace qicert
