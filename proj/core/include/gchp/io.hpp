#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gchp {

// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double value);
// Strict full-string parse; throws std::invalid_argument on trailing junk.
[[nodiscard]] double parse_double(std::string_view text);

// FNV-1a 64-bit digest rendered as 16 hex digits.
[[nodiscard]] std::string content_hash(std::string_view data);

// Seed and config digest stamped into every output file.
struct Provenance {
    std::string config_hash;
    std::uint64_t seed{0};
};

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Delimiter-separated table with '#'-prefixed metadata lines.
class Table {
public:
    explicit Table(std::vector<std::string> columns);

    void add_meta(std::string key, std::string value);
    void add_row(std::vector<std::string> cells);
    void add_row(const std::vector<double>& cells);

    [[nodiscard]] const std::vector<std::string>& columns() const noexcept { return columns_; }
    [[nodiscard]] const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
    [[nodiscard]] std::string render(char delimiter = ',') const;

private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<std::string>> rows_;
};

void stamp(Table& table, const Provenance& provenance);

} // namespace gchp
