#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vpr {

/// Minimal CSV writer: a header row declaring the schema, then rows of
/// fields. Doubles are written with 17 significant digits.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns) : out_(path), width_(columns.size()) {
        if (!out_) throw std::runtime_error("cannot write '" + path + "'");
        for (std::size_t c = 0; c < columns.size(); ++c) out_ << (c ? "," : "") << columns[c];
        out_ << "\n";
    }

    CsvWriter& operator<<(const std::string& field) { return put(field); }
    CsvWriter& operator<<(const char* field) { return put(field); }
    CsvWriter& operator<<(double v) { return put(num(v)); }
    CsvWriter& operator<<(std::size_t v) { return put(std::to_string(v)); }
    CsvWriter& operator<<(const std::optional<std::size_t>& v) { return put(v ? std::to_string(*v) : std::string()); }

    void end_row() {
        if (col_ != width_) throw std::logic_error("csv row has wrong number of fields");
        out_ << "\n";
        col_ = 0;
    }

    [[nodiscard]] static std::string num(double v) {
        if (std::isnan(v)) return "nan";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

private:
    CsvWriter& put(const std::string& field) {
        out_ << (col_ ? "," : "") << field;
        ++col_;
        return *this;
    }

    std::ofstream out_;
    std::size_t width_;
    std::size_t col_ = 0;
};

}  // namespace vpr
