#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mixea::cli {

/// Shortest round-trip decimal; non-finite values as "inf", "-inf", "nan".
std::string format_number(double v);

/// Finite values as JSON numbers, the rest as the strings used by format_number.
nlohmann::json json_number(double v);

/// Inverse of format_number. Throws std::invalid_argument on malformed text.
double parse_number(std::string_view text);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    std::string str() const;
    const std::vector<std::string>& header() const { return header_; }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Splits CSV text into rows of cells (handles quoted cells).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// JSON text with two-space indent and a trailing newline.
std::string dump_report(const nlohmann::json& j);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace mixea::cli
