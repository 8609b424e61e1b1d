#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "coastcast/linalg.hpp"

namespace coastcast {

// Column-major table of doubles with unique named columns.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data; // data[c][row]

    std::size_t n_rows() const { return data.empty() ? 0 : data[0].size(); }
    std::size_t n_cols() const { return columns.size(); }

    bool has_column(std::string_view name) const;
    std::size_t col_index(std::string_view name) const; // throws bad_argument
    std::vector<double>& col(std::string_view name);
    const std::vector<double>& col(std::string_view name) const;

    void add_column(std::string name, std::vector<double> values);
    void drop_column(std::string_view name);

    Table take_rows(const std::vector<std::size_t>& rows) const;

    Matrix to_matrix(const std::vector<std::string>& names) const;

    std::string to_csv() const;
    static Table from_csv(std::string_view text);
};

// The modeling matrix layout after the ECV join.
inline const std::vector<std::string> kFeatureTableColumns = {
    "cell_id", "year", "lat_center", "lon_center", "area", "perimeter",
    "heat_content", "salinity", "temperature", "thermosteric_sea_level",
    "halosteric_sea_level", "total_steric", "area_next"};

// Predictor columns (X); the target y is area_next.
inline const std::vector<std::string> kPredictorColumns = {
    "lat_center", "lon_center", "area", "perimeter",
    "heat_content", "salinity", "temperature", "thermosteric_sea_level",
    "halosteric_sea_level", "total_steric"};

} // namespace coastcast
