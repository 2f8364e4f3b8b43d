#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace nlsphase {

using json = nlohmann::ordered_json;

// Shortest round-trip decimal form; identical bits give identical text.
std::string fmt_num(double x);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    void comment(const std::string& text);
    void header(std::initializer_list<std::string> cols);
    void header(const std::vector<std::string>& cols);
    void row(std::initializer_list<double> values);
    void row(std::span<const double> values);

private:
    std::string path_;
    std::ofstream out_;
};

struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);

// FNV-1a 64-bit, used for config hashes in manifests.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace nlsphase
