#include "ionsim/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ionsim {

CsvWriter::CsvWriter(std::string path, std::vector<std::pair<std::string, std::string>> metadata,
                     std::vector<std::string> columns)
    : path_(std::move(path)) {
    for (const auto& [k, v] : metadata)
        buffer_ += "# " + k + ": " + v + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i)
            buffer_ += ",";
        buffer_ += columns[i];
    }
    buffer_ += "\n";
}

std::string CsvWriter::format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            buffer_ += ",";
        buffer_ += format(values[i]);
    }
    buffer_ += "\n";
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            buffer_ += ",";
        buffer_ += values[i];
    }
    buffer_ += "\n";
}

void CsvWriter::close() {
    if (closed_)
        return;
    closed_ = true;
    write_text_file(path_, buffer_);
}

CsvWriter::~CsvWriter() {
    if (!closed_) {
        try {
            close();
        } catch (...) {
        }
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path);
    out << text;
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

}  // namespace ionsim
