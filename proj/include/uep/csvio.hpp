#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "uep/block_partition.hpp"

namespace uep {

// CSV emitter with a versioned schema comment on the first line and
// deterministic number formatting, so reruns with the same seed produce
// byte-identical files.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& schema,
              const std::vector<std::string>& columns);

    void begin_row();
    void field(double v);
    void field(long v);
    void field(int v) { field(static_cast<long>(v)); }
    void field(const std::string& v);
    void end_row();

    const std::string& path() const { return path_; }

  private:
    std::ofstream out_;
    std::string path_;
    bool first_in_row_ = true;
};

std::string format_double(double v);

// Plain CSV matrix, one row per line.
void write_matrix_csv(const Matrix& m, const std::string& path);
Matrix read_matrix_csv(const std::string& path);

// Raw little-endian float64 with a 16-byte header: rows then cols as u64.
void write_matrix_binary(const Matrix& m, const std::string& path);
Matrix read_matrix_binary(const std::string& path);

}  // namespace uep
