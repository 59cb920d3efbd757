#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace alphacross::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers; // 1-based source line of each row
};

// Reads a comma-separated file with a header line. Fields are trimmed; blank
// lines are skipped; a leading UTF-8 BOM is dropped. No quoting support.
Table read(const std::filesystem::path& path);

std::vector<std::string> split_line(const std::string& line);

} // namespace alphacross::csv
