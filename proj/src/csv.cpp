#include "inferedge/csv.hpp"

#include <charconv>
#include <cmath>

#include "inferedge/error.hpp"

namespace inferedge {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw Error("format_number: conversion failed");
    return std::string(buf, end);
}

std::string join(const std::vector<std::string>& fields, char sep) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(sep);
        out += fields[i];
    }
    return out;
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path), header_(std::move(header)) {
    if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
    out_ << join(header_) << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != header_.size())
        throw Error("csv row has " + std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(header_.size()));
    out_ << join(fields) << '\n';
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw Error("csv has no column '" + std::string(name) + "'");
}

double CsvTable::number(std::size_t r, std::string_view name) const {
    const std::string& s = text(r, name);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error("csv field '" + s + "' in column '" + std::string(name) + "' is not a number");
    return v;
}

const std::string& CsvTable::text(std::size_t r, std::string_view name) const {
    return rows.at(r).at(column(name));
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw Error("'" + path.string() + "' is empty");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split(line);
        if (fields.size() != t.header.size())
            throw Error("'" + path.string() + "': ragged row '" + line + "'");
        t.rows.push_back(std::move(fields));
    }
    return t;
}

}  // namespace inferedge
