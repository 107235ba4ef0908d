#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qnil/quasinil.hpp"

namespace qnil::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct NamedSequence {
  std::string label;
  RadiusSequence sequence;

  friend bool operator==(const NamedSequence&, const NamedSequence&) = default;
};

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;

  friend bool operator==(const Assertion&, const Assertion&) = default;
};

/// A module error caught while running a command.
struct Failure {
  std::string context;
  std::string code;
  std::string message;
  int completed_depth = 0;

  friend bool operator==(const Failure&, const Failure&) = default;
};

struct Report {
  std::string scenario;
  std::string command;
  std::string timestamp;
  std::string tool_version = kToolVersion;
  std::string input_digest;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::vector<NamedSequence> sequences;
  std::vector<Assertion> assertions;
  std::vector<std::string> warnings;
  std::vector<Failure> failures;

  bool all_assertions_passed() const;
  friend bool operator==(const Report&, const Report&) = default;
};

enum class ReportFormat { json, csv, text };

ReportFormat parse_format(const std::string& name);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string content_digest(const std::string& bytes);
std::string utc_timestamp();

nlohmann::json report_to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

std::string render_json(const Report& r);
std::string render_text(const Report& r);
std::string render_csv(const RadiusSequence& s);

/// json/text: destination is a file path, "-" for stdout. csv: destination is
/// a directory receiving one file per sequence. Returns the files written.
std::vector<std::string> write_report(const Report& r, ReportFormat format, const std::string& destination);

}  // namespace qnil::cli
