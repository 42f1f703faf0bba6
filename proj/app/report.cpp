#include "report.hpp"

#include <cstdio>
#include <stdexcept>

namespace ouharvest::app {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) {
        throw std::logic_error("CsvTable: row has " + std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(header_.size()));
    }
    rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(cells[i]);
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

Json make_report(const RunConfig& config, Json results, Json diagnostics) {
    Json j;
    j["version"] = kToolVersion;
    j["config"] = to_json(config);
    j["results"] = std::move(results);
    j["diagnostics"] = std::move(diagnostics);
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace ouharvest::app
