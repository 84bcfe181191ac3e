#pragma once

#include <string>
#include <vector>

#include "pilotgrid/geometry.hpp"

namespace pilotgrid {

// Minimal CSV writing with '#'-prefixed comment headers. All numeric output
// goes through one formatter so datasets are byte-stable across runs.
class CsvWriter {
public:
    void comment(const std::string& line);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& fields);

    const std::string& content() const { return out_; }
    void save(const std::string& path) const;

private:
    std::string out_;
};

std::string format_double(double v);
std::string format_int(long long v);

// Numeric table reader: skips blank lines, '#' comments, and one leading
// header line when its first field is not numeric.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

// Point-set wire formats: CSV columns x_m,y_m[,mark]; seed in the header.
std::string point_set_to_csv(const PointSet& points);
std::string point_set_to_json(const PointSet& points);
PointSet point_set_from_csv(const std::string& path);

}  // namespace pilotgrid
