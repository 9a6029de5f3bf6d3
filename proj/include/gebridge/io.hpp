#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gebridge/diagnostics.hpp"
#include "gebridge/ge_bridge.hpp"
#include "gebridge/kernels.hpp"
#include "gebridge/trace_sim.hpp"

namespace gebridge::io {

/// Malformed input file (trace, config).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Traces
//
// Text: one trace per line, each slot written as the character '0' or '1'.
// Binary: a sequence of records, each
//   "GEB1" | u32 little-endian slot count | ceil(count / 8) bytes
// with slot n stored in bit (n % 8) of byte (n / 8), least significant first.
// A single-trace file is one record.
// ---------------------------------------------------------------------------

inline constexpr char kTraceMagic[4] = {'G', 'E', 'B', '1'};

void write_traces_text(std::ostream& out, std::span<const BinaryTrace> traces);
std::vector<BinaryTrace> read_traces_text(std::istream& in);

void write_trace_binary(std::ostream& out, const BinaryTrace& trace);
void write_traces_binary(std::ostream& out, std::span<const BinaryTrace> traces);
std::vector<BinaryTrace> read_traces_binary(std::istream& in);

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

nlohmann::json to_json(const KernelSpec& k);
nlohmann::json to_json(const LinkConfig& cfg);
nlohmann::json to_json(const GeParams& g);
nlohmann::json to_json(const MarkovGaps& g);
nlohmann::json to_json(const RunLengthDist& d);
nlohmann::json to_json(const TransitionEstimate& e);
nlohmann::json to_json(const PersistenceEstimate& e);
nlohmann::json to_json(const FidelityReport& r);

KernelSpec kernel_from_json(const nlohmann::json& j);

/// Column order of the GeParams CSV row.
std::vector<std::string> ge_params_csv_header();
std::vector<std::string> ge_params_csv_row(const GeParams& g);

/// Fidelity grid columns: tc_over_d, s_over_sigma, kernel, max_gap, dtv_ge,
/// dtv_second, err_pct, followed by supporting columns.
std::vector<std::string> report_csv_header();
std::vector<std::string> report_csv_row(const FidelityReport& r);

/// Shortest round-trippable decimal representation ("nan" for NaN).
std::string format_number(double x);

void write_csv_line(std::ostream& out, const std::vector<std::string>& fields);

// ---------------------------------------------------------------------------
// key=value configuration
//
// One assignment per line; blank lines and lines starting with '#' are
// ignored; surrounding whitespace is trimmed. Later keys override earlier
// ones.
// ---------------------------------------------------------------------------

std::map<std::string, std::string> parse_key_value(std::istream& in);
std::map<std::string, std::string> load_key_value_file(const std::string& path);

}  // namespace gebridge::io
