#include "uep/csvio.hpp"

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace uep {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& schema,
                     const std::vector<std::string>& columns)
    : out_(path), path_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    out_ << "# schema: " << schema << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
}

void CsvWriter::begin_row() { first_in_row_ = true; }

void CsvWriter::field(double v) {
    out_ << (first_in_row_ ? "" : ",") << format_double(v);
    first_in_row_ = false;
}

void CsvWriter::field(long v) {
    out_ << (first_in_row_ ? "" : ",") << v;
    first_in_row_ = false;
}

void CsvWriter::field(const std::string& v) {
    out_ << (first_in_row_ ? "" : ",") << v;
    first_in_row_ = false;
}

void CsvWriter::end_row() {
    out_ << "\n";
    if (!out_) throw std::runtime_error("write failed: " + path_);
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (long r = 0; r < m.rows(); ++r) {
        for (long c = 0; c < m.cols(); ++c)
            out << (c ? "," : "") << format_double(m(r, c));
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("ragged csv matrix: " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("empty csv matrix: " + path);
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

void write_matrix_binary(const Matrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const std::uint64_t rows = m.rows(), cols = m.cols();
    out.write(reinterpret_cast<const char*>(&rows), 8);
    out.write(reinterpret_cast<const char*>(&cols), 8);
    for (std::uint64_t r = 0; r < rows; ++r)
        for (std::uint64_t c = 0; c < cols; ++c) {
            const double v = m(r, c);
            out.write(reinterpret_cast<const char*>(&v), 8);
        }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix read_matrix_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 8);
    in.read(reinterpret_cast<char*>(&cols), 8);
    if (!in || rows == 0 || cols == 0 || rows > (1u << 24) || cols > (1u << 24))
        throw std::runtime_error("bad binary matrix header: " + path);
    Matrix m(rows, cols);
    for (std::uint64_t r = 0; r < rows; ++r)
        for (std::uint64_t c = 0; c < cols; ++c) {
            double v;
            in.read(reinterpret_cast<char*>(&v), 8);
            m(r, c) = v;
        }
    if (!in) throw std::runtime_error("truncated binary matrix: " + path);
    return m;
}

}  // namespace uep
