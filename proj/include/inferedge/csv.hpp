#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace inferedge {

/// Shortest text that parses back to the same double.
std::string format_number(double value);

/// Minimal writer for our own unquoted CSV files (no field may contain a comma).
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

    void row(const std::vector<std::string>& fields);
    [[nodiscard]] std::size_t columns() const noexcept { return header_.size(); }

private:
    std::ofstream out_;
    std::vector<std::string> header_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position by header name; throws Error if absent.
    [[nodiscard]] std::size_t column(std::string_view name) const;
    [[nodiscard]] double number(std::size_t row, std::string_view name) const;
    [[nodiscard]] const std::string& text(std::size_t row, std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

std::string join(const std::vector<std::string>& fields, char sep = ',');
std::vector<std::string> split(std::string_view line, char sep = ',');

}  // namespace inferedge
