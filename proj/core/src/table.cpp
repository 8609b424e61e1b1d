#include "coastcast/table.hpp"

#include <algorithm>

#include "coastcast/csv.hpp"
#include "coastcast/error.hpp"

namespace coastcast {

bool Table::has_column(std::string_view name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::size_t Table::col_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    raise(errc::bad_argument, "no column named '" + std::string(name) + "'");
}

std::vector<double>& Table::col(std::string_view name) { return data[col_index(name)]; }

const std::vector<double>& Table::col(std::string_view name) const {
    return data[col_index(name)];
}

void Table::add_column(std::string name, std::vector<double> values) {
    if (has_column(name)) raise(errc::bad_argument, "duplicate column " + name);
    if (!data.empty() && values.size() != n_rows()) {
        raise(errc::bad_argument, "column length mismatch for " + name);
    }
    columns.push_back(std::move(name));
    data.push_back(std::move(values));
}

void Table::drop_column(std::string_view name) {
    const std::size_t i = col_index(name);
    columns.erase(columns.begin() + static_cast<std::ptrdiff_t>(i));
    data.erase(data.begin() + static_cast<std::ptrdiff_t>(i));
}

Table Table::take_rows(const std::vector<std::size_t>& rows) const {
    Table out;
    out.columns = columns;
    out.data.resize(data.size());
    for (std::size_t c = 0; c < data.size(); ++c) {
        out.data[c].reserve(rows.size());
        for (std::size_t r : rows) out.data[c].push_back(data[c][r]);
    }
    return out;
}

Matrix Table::to_matrix(const std::vector<std::string>& names) const {
    Matrix m(n_rows(), names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
        const auto& column = col(names[j]);
        for (std::size_t i = 0; i < column.size(); ++i) m(i, j) = column[i];
    }
    return m;
}

std::string Table::to_csv() const {
    CsvWriter w(columns);
    const std::size_t rows = n_rows();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < data.size(); ++c) w.field(data[c][r]);
        w.end_row();
    }
    return w.str();
}

Table Table::from_csv(std::string_view text) {
    const CsvDoc doc = read_csv(text);
    Table out;
    out.columns = doc.header;
    out.data.assign(doc.header.size(), {});
    for (auto& col : out.data) col.reserve(doc.rows.size());
    std::size_t line = 1;
    for (const auto& row : doc.rows) {
        ++line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            out.data[c].push_back(parse_double(row[c], line));
        }
    }
    return out;
}

} // namespace coastcast
