#include "qnil/cli/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qnil/cli/serialize.hpp"
#include "qnil/error.hpp"

namespace qnil::cli {
namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sanitize(const std::string& label) {
  std::string out;
  for (const char c : label) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out.empty() ? "sequence" : out;
}

void write_file(const std::string& path, const std::string& bytes) {
  if (path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << bytes;
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

bool is_word(const json& j) {
  if (!j.is_array() || j.empty()) return false;
  for (const json& e : j) {
    if (!e.is_number_unsigned()) return false;
  }
  return true;
}

std::string inline_value(const json& v) {
  if (v.is_number_float()) return fmt_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + inline_value(v[i]);
    return out + "]";
  }
  return v.dump();
}

bool is_flat(const json& v) {
  if (!v.is_array()) return !v.is_object();
  for (const json& e : v) {
    if (e.is_object() || (e.is_array() && !is_flat(e))) return false;
  }
  return v.size() <= 32;
}

void render_node(std::ostringstream& os, const std::string& key, const json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (key == "witness" && is_word(v)) {
    os << pad << key << ": " << render_periodic_word(v.get<Word>()) << '\n';
  } else if (key == "basis" && v.is_array()) {
    os << pad << key << ": " << v.size() << " vectors\n";
  } else if (is_flat(v)) {
    os << pad << key << ": " << inline_value(v) << '\n';
  } else if (v.is_object()) {
    os << pad << key << ":\n";
    for (const auto& [k, child] : v.items()) render_node(os, k, child, indent + 1);
  } else {
    os << pad << key << ":\n";
    for (std::size_t i = 0; i < v.size(); ++i) render_node(os, "[" + std::to_string(i) + "]", v[i], indent + 1);
  }
}

}  // namespace

bool Report::all_assertions_passed() const {
  for (const auto& a : assertions) {
    if (!a.passed) return false;
  }
  return true;
}

ReportFormat parse_format(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "text") return ReportFormat::text;
  throw Error(ErrorCode::InvalidArgument, "unknown report format '" + name + "'");
}

std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json report_to_json(const Report& r) {
  json seqs = json::array();
  for (const auto& s : r.sequences) seqs.push_back({{"label", s.label}, {"sequence", to_json(s.sequence)}});
  json asserts = json::array();
  for (const auto& a : r.assertions) asserts.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  json fails = json::array();
  for (const auto& f : r.failures) {
    fails.push_back({{"context", f.context}, {"code", f.code}, {"message", f.message},
                     {"completed_depth", f.completed_depth}});
  }
  return {{"scenario", r.scenario},       {"command", r.command},   {"timestamp", r.timestamp},
          {"tool_version", r.tool_version}, {"input_digest", r.input_digest},
          {"params", r.params},           {"results", r.results},   {"sequences", std::move(seqs)},
          {"assertions", std::move(asserts)}, {"warnings", r.warnings}, {"failures", std::move(fails)}};
}

Report report_from_json(const json& j) {
  Report r;
  try {
    r.scenario = j.at("scenario").get<std::string>();
    r.command = j.at("command").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.tool_version = j.at("tool_version").get<std::string>();
    r.input_digest = j.at("input_digest").get<std::string>();
    r.params = j.at("params");
    r.results = j.at("results");
    for (const json& s : j.at("sequences")) {
      r.sequences.push_back({s.at("label").get<std::string>(), radius_sequence_from_json(s.at("sequence"))});
    }
    for (const json& a : j.at("assertions")) {
      r.assertions.push_back({a.at("name").get<std::string>(), a.at("passed").get<bool>(),
                              a.at("detail").get<std::string>()});
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const json& f : j.at("failures")) {
      r.failures.push_back({f.at("context").get<std::string>(), f.at("code").get<std::string>(),
                            f.at("message").get<std::string>(), f.at("completed_depth").get<int>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string render_json(const Report& r) { return report_to_json(r).dump(2) + "\n"; }

std::string render_csv(const RadiusSequence& s) {
  std::string out = "n,root,log_norm\n";
  for (const RadiusPoint& p : s.points) {
    out += std::to_string(p.n) + ',' + fmt_double(p.root) + ',' + (p.exact_zero ? "" : fmt_double(p.log_norm)) + '\n';
  }
  return out;
}

std::string render_text(const Report& r) {
  std::ostringstream os;
  os << "qnil " << r.tool_version << "  " << r.command << " on scenario '" << r.scenario << "'\n";
  os << "input digest " << r.input_digest << "  at " << r.timestamp << "\n";
  render_node(os, "params", r.params, 0);
  if (!r.results.empty()) render_node(os, "results", r.results, 0);
  for (const auto& s : r.sequences) {
    os << "sequence " << s.label << ": " << s.sequence.points.size() << " points";
    if (!s.sequence.points.empty()) {
      const RadiusPoint& last = s.sequence.points.back();
      os << ", r_" << last.n << " = " << (last.exact_zero ? std::string("0 (exact)") : fmt_double(last.root));
    }
    os << '\n';
  }
  for (const auto& a : r.assertions) {
    os << (a.passed ? "PASS " : "FAIL ") << a.name;
    if (!a.detail.empty()) os << "  (" << a.detail << ")";
    os << '\n';
  }
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
  for (const auto& f : r.failures) {
    os << "failure in " << f.context << ": " << f.code << ": " << f.message;
    if (f.code == "BudgetExceeded") os << " (completed depth " << f.completed_depth << ")";
    os << '\n';
  }
  return os.str();
}

std::vector<std::string> write_report(const Report& r, ReportFormat format, const std::string& destination) {
  switch (format) {
    case ReportFormat::json:
      write_file(destination, render_json(r));
      return {destination};
    case ReportFormat::text:
      write_file(destination, render_text(r));
      return {destination};
    case ReportFormat::csv: break;
  }
  std::error_code ec;
  std::filesystem::create_directories(destination, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create directory '" + destination + "': " + ec.message());
  std::vector<std::string> files;
  for (const auto& s : r.sequences) {
    const std::string path = (std::filesystem::path(destination) / (sanitize(s.label) + ".csv")).string();
    write_file(path, render_csv(s.sequence));
    files.push_back(path);
  }
  return files;
}

}  // namespace qnil::cli
