#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace ouharvest::app {

inline constexpr const char* kToolVersion = "1.0.0";

using Json = nlohmann::ordered_json;

// 17 significant digits, enough to round-trip any double.
std::string format_real(double v);

// RFC 4180 quoting for cells that need it.
std::string csv_escape(const std::string& cell);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }

    // LF line endings, header first.
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string cell(double v) { return format_real(v); }
inline std::string cell(bool v) { return v ? "true" : "false"; }
inline std::string cell(std::uint64_t v) { return std::to_string(v); }
inline std::string cell(const char* v) { return v; }
inline std::string cell(const std::string& v) { return v; }

// {version, config, results, diagnostics}
Json make_report(const RunConfig& config, Json results, Json diagnostics);

// Two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace ouharvest::app
