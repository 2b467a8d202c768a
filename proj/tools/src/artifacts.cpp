#include "mcfd_app/artifacts.hpp"

#include <cstdio>
#include <stdexcept>

namespace mcfd::app {

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string exact(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

GridStamp GridStamp::of(const GridSpec& grid, bool smoothing) {
    return {grid.L(), grid.N(), grid.M(), grid.mesh_ratio(), smoothing};
}

nlohmann::json GridStamp::to_json() const {
    return {{"L", L}, {"N", N}, {"M", M}, {"mesh_ratio", mesh_ratio}, {"smoothing", smoothing}};
}

std::string GridStamp::comment() const {
    return "# L=" + exact(L) + " N=" + std::to_string(N) + " M=" + std::to_string(M) +
           " mesh_ratio=" + fixed(mesh_ratio, 6) + " smoothing=" + (smoothing ? "on" : "off");
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& command, const GridStamp& stamp,
                     std::initializer_list<std::string> columns, const std::vector<std::string>& extra_comments)
    : path_(path), out_(path), columns_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << "# mcfd " << command << "\n" << stamp.comment() << "\n";
    for (const auto& c : extra_comments) out_ << "# " << c << "\n";
    bool first = true;
    for (const auto& c : columns) {
        out_ << (first ? "" : ",") << c;
        first = false;
    }
    out_ << "\n";
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("CSV row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
    return *this;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

}  // namespace mcfd::app
