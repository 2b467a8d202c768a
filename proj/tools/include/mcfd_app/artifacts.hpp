#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"

#include "mcfd/grid_domain.hpp"

namespace mcfd::app {

/// Fixed-point formatting ("%.*f").
std::string fixed(double value, int decimals);
/// Shortest round-trip formatting ("%.17g").
std::string exact(double value);

/// Resolved discretization stamped into every artifact.
struct GridStamp {
    double L = 0.0;
    int N = 0;
    int M = 0;
    double mesh_ratio = 0.0;  // actual dtau / dx^2
    bool smoothing = true;

    static GridStamp of(const GridSpec& grid, bool smoothing);
    nlohmann::json to_json() const;
    std::string comment() const;  // "# L=2 N=1536 M=1474 mesh_ratio=0.4 smoothing=on"
};

/// CSV file with '#' comment lines (command, grid stamp) before the header row.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& command, const GridStamp& stamp,
              std::initializer_list<std::string> columns, const std::vector<std::string>& extra_comments = {});

    CsvWriter& row(const std::vector<std::string>& cells);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace mcfd::app
