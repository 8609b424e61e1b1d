#include "coastcast/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "coastcast/error.hpp"

namespace coastcast {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, std::size_t line_no) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        raise(errc::non_numeric,
              "line " + std::to_string(line_no) + ": '" + std::string(field) +
                  "' is not a number");
    }
    return v;
}

namespace {

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.emplace_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

} // namespace

CsvDoc read_csv(std::string_view text) {
    CsvDoc doc;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = eol + 1;
        ++line_no;
        if (line.empty() && pos > text.size()) break;
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (doc.header.empty()) {
            doc.header = std::move(fields);
        } else {
            if (fields.size() != doc.header.size()) {
                raise(errc::ragged_row,
                      "line " + std::to_string(line_no) + ": expected " +
                          std::to_string(doc.header.size()) + " fields, got " +
                          std::to_string(fields.size()));
            }
            doc.rows.push_back(std::move(fields));
        }
    }
    return doc;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) raise(errc::io_error, "cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) raise(errc::io_error, "short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        raise(errc::io_error, "rename " + tmp + " -> " + path + " failed");
    }
}

CsvWriter::CsvWriter(std::vector<std::string> header) : n_cols_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ += ',';
        out_ += header[i];
    }
    out_ += '\n';
}

void CsvWriter::field(double v) { field(std::string_view(format_double(v))); }
void CsvWriter::field(long v) { field(std::string_view(std::to_string(v))); }
void CsvWriter::field(int v) { field(std::string_view(std::to_string(v))); }

void CsvWriter::field(std::string_view v) {
    if (col_) out_ += ',';
    out_ += v;
    ++col_;
}

void CsvWriter::end_row() {
    if (col_ != n_cols_) {
        raise(errc::bad_argument, "csv row has " + std::to_string(col_) +
                                      " fields, header has " +
                                      std::to_string(n_cols_));
    }
    out_ += '\n';
    col_ = 0;
}

} // namespace coastcast
