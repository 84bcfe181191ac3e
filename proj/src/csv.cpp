#include "pilotgrid/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pilotgrid {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string format_int(long long v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", v);
    return buf;
}

void CsvWriter::comment(const std::string& line) {
    out_ += "# ";
    out_ += line;
    out_ += '\n';
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    row(columns);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ += ',';
        out_ += fields[i];
    }
    out_ += '\n';
}

void CsvWriter::save(const std::string& path) const {
    write_text_file(path, out_);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string point_set_to_csv(const PointSet& points) {
    CsvWriter w;
    w.comment(std::string("seed = ") + format_int(static_cast<long long>(points.seed)));
    const bool marked = points.has_marks();
    w.header(marked ? std::vector<std::string>{"x_m", "y_m", "mark"}
                    : std::vector<std::string>{"x_m", "y_m"});
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::vector<std::string> fields = {format_double(points.points[i].x()),
                                           format_double(points.points[i].y())};
        if (marked) fields.push_back(format_double(points.marks[i]));
        w.row(fields);
    }
    return w.content();
}

std::string point_set_to_json(const PointSet& points) {
    std::string out = "{\n  \"seed\": " + format_int(static_cast<long long>(points.seed)) +
                      ",\n  \"points\": [";
    const bool marked = points.has_marks();
    for (std::size_t i = 0; i < points.size(); ++i) {
        out += i ? ",\n    " : "\n    ";
        out += "{\"x_m\": " + format_double(points.points[i].x()) +
               ", \"y_m\": " + format_double(points.points[i].y());
        if (marked) out += ", \"mark\": " + format_double(points.marks[i]);
        out += "}";
    }
    out += "\n  ]\n}\n";
    return out;
}

PointSet point_set_from_csv(const std::string& path) {
    PointSet out;
    for (const auto& row : read_numeric_csv(path)) {
        if (row.size() < 2) throw std::runtime_error("point row needs x,y: " + path);
        out.points.emplace_back(row[0], row[1]);
        if (row.size() >= 3) out.marks.push_back(row[2]);
    }
    if (!out.marks.empty() && out.marks.size() != out.points.size())
        throw std::runtime_error("inconsistent mark column in " + path);
    return out;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first_data_line = true;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        bool numeric = true;
        while (std::getline(ss, field, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(field, &used);
                row.push_back(v);
                if (used == 0) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first_data_line) {
                first_data_line = false;
                continue;  // header row
            }
            throw std::runtime_error("non-numeric row in " + path + ": " + line);
        }
        first_data_line = false;
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace pilotgrid
