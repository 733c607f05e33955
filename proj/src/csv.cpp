#include "zigp/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zigp/errors.hpp"

namespace zigp {

int Table::find(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

const std::vector<double>& Table::col(const std::string& name) const {
    int i = find(name);
    if (i < 0) throw data_error("column '" + name + "' not found in table");
    return data[i];
}

Table read_csv_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw data_error("cannot open " + path);

    Table t;
    std::string line;
    if (!std::getline(f, line)) throw data_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string field;
    while (std::getline(hs, field, ',')) t.columns.push_back(field);
    if (t.columns.empty()) throw data_error(path + ": no header columns");
    t.data.resize(t.columns.size());

    long line_no = 1;
    while (std::getline(f, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        size_t start = 0, col = 0;
        while (true) {
            size_t end = line.find(',', start);
            std::string cell = line.substr(start, end == std::string::npos ? end : end - start);
            if (col >= t.columns.size())
                throw data_error(path + ":" + std::to_string(line_no) + ": too many fields");
            char* rest = nullptr;
            double v = std::strtod(cell.c_str(), &rest);
            if (rest == cell.c_str() || *rest != '\0')
                throw data_error(path + ":" + std::to_string(line_no) + ": malformed value '" +
                                 cell + "' in column " + t.columns[col]);
            t.data[col].push_back(v);
            ++col;
            if (end == std::string::npos) break;
            start = end + 1;
        }
        if (col != t.columns.size())
            throw data_error(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(t.columns.size()) + " fields, got " +
                             std::to_string(col));
    }
    return t;
}

Dataset read_dataset(const Table& table, const std::string& x_col, const std::string& y_col,
                     const std::string& response_col,
                     const std::vector<std::string>& covariates) {
    const auto& xs = table.col(x_col);
    const auto& ys = table.col(y_col);
    const auto& resp = table.col(response_col);

    Dataset d;
    const int n = static_cast<int>(resp.size());
    d.coords.resize(n);
    d.response.resize(n);
    for (int i = 0; i < n; ++i) {
        d.coords[i] = {xs[i], ys[i]};
        d.response[i] = resp[i];
    }
    for (const auto& name : covariates) {
        const auto& v = table.col(name);
        d.covariates[name] = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    }
    return d;
}

void atomic_write(const std::string& path,
                  const std::function<void(const std::string&)>& writer) {
    std::string tmp = path + ".tmp";
    try {
        writer(tmp);
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return fnv1a(ss.str());
}

}  // namespace zigp
