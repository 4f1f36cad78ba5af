#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace expfunc {

using json = nlohmann::ordered_json;

// 17 significant digits.
std::string fmt17(double v);

// JSON text with every floating value rendered through fmt17; 2-space indent.
std::string dump_json(const json& j);

std::string csv_two_columns(const std::string& h1, const std::string& h2, const std::vector<double>& a,
                            const std::vector<double>& b);
std::string csv_column(const std::string& header, const std::vector<double>& v);
// Reads a CSV with a header line; returns columns in file order.
std::vector<std::vector<double>> read_csv_columns(const std::string& path, std::vector<std::string>* headers = nullptr);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace expfunc
