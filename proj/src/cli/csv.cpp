#include <array>
#include <charconv>
#include <cmath>

#include "amsa/cli.hpp"

namespace amsa::cli {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), end);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("CsvWriter: column count mismatch");
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) out_ << ',';
        out_ << cells[k];
    }
    out_ << '\n';
}

}  // namespace amsa::cli
