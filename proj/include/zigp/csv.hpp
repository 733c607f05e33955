#pragma once

#include <functional>
#include <string>
#include <vector>

#include "zigp/dataset.hpp"

namespace zigp {

// Numeric CSV table with a header row.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // column-major

    int n_rows() const { return columns.empty() ? 0 : static_cast<int>(data[0].size()); }
    int find(const std::string& name) const;  // -1 when absent
    const std::vector<double>& col(const std::string& name) const;  // throws naming the column
};

Table read_csv_table(const std::string& path);

Dataset read_dataset(const Table& table, const std::string& x_col, const std::string& y_col,
                     const std::string& response_col,
                     const std::vector<std::string>& covariates);

// Runs `writer` against a temporary path, then renames onto `path`, so a
// failed stage leaves no partial output behind.
void atomic_write(const std::string& path,
                  const std::function<void(const std::string&)>& writer);

// FNV-1a 64-bit, used for config hashes and output checksums.
std::uint64_t fnv1a(const std::string& bytes);
std::uint64_t fnv1a_file(const std::string& path);

}  // namespace zigp
