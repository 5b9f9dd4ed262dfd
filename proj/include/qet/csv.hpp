// csv.hpp — deterministic CSV emission for the command-line tools: comma
// separation, header row, floats at 12 significant digits, fixed row order.

#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace qet {

inline std::string format_float(double v) {
    if (v == 0.0) v = 0.0;  // collapse negative zero
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void header(const std::vector<std::string>& names) { write_row(names); }

    CsvWriter& field(const std::string& s) {
        row_.push_back(s);
        return *this;
    }
    CsvWriter& field(double v) { return field(format_float(v)); }
    CsvWriter& field(int v) { return field(std::to_string(v)); }

    void end_row() {
        write_row(row_);
        row_.clear();
    }

  private:
    void write_row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ostream& out_;
    std::vector<std::string> row_;
};

}  // namespace qet
