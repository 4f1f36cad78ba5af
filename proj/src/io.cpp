#include "expfunc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace expfunc {

std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void dump(const json& j, std::string& out, int depth) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string end_pad(2 * depth, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + json(it.key()).dump() + ": ";
                dump(it.value(), out, depth + 1);
            }
            out += "\n" + end_pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                dump(j[i], out, depth + 1);
            }
            out += "\n" + end_pad + "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            // JSON has no inf/nan literals
            out += std::isfinite(v) ? fmt17(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string dump_json(const json& j) {
    std::string out;
    dump(j, out, 0);
    out += "\n";
    return out;
}

std::string csv_two_columns(const std::string& h1, const std::string& h2, const std::vector<double>& a,
                            const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("csv_two_columns: column lengths differ");
    std::string out = h1 + "," + h2 + "\n";
    for (std::size_t i = 0; i < a.size(); ++i) out += fmt17(a[i]) + "," + fmt17(b[i]) + "\n";
    return out;
}

std::string csv_column(const std::string& header, const std::vector<double>& v) {
    std::string out = header + "\n";
    for (double x : v) out += fmt17(x) + "\n";
    return out;
}

std::vector<std::vector<double>> read_csv_columns(const std::string& path, std::vector<std::string>* headers) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    std::vector<std::string> names;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) names.push_back(cell);
    }
    std::vector<std::vector<double>> cols(names.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (c >= cols.size()) throw std::runtime_error(path + ": ragged row");
            cols[c++].push_back(std::stod(cell));
        }
        if (c != cols.size()) throw std::runtime_error(path + ": ragged row");
    }
    if (headers) *headers = names;
    return cols;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace expfunc
