#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace coastcast {

// Shortest representation that parses back to the same double.
std::string format_double(double v);

double parse_double(std::string_view field, std::size_t line_no);

struct CsvDoc {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Comma-delimited, header row mandatory, no quoting (all artifact files are
// plain numeric / token columns). Throws ragged_row on inconsistent width.
CsvDoc read_csv(std::string_view text);

std::string read_file(const std::string& path);

// Write via temp file + rename so a killed run never leaves a torn file.
void write_file_atomic(const std::string& path, std::string_view content);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void field(double v);
    void field(long v);
    void field(int v);
    void field(std::string_view v);
    void end_row();

    const std::string& str() const { return out_; }

private:
    std::string out_;
    std::size_t n_cols_ = 0;
    std::size_t col_ = 0;
};

} // namespace coastcast
