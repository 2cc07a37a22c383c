#include "qbat/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qbat {

std::string format_sig12(double v) {
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::InternalInconsistency, "non-finite value in report output");
    }
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.12g", v);
    return buffer;
}

namespace {

void dump_rec(const nlohmann::json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    const std::string closing_pad(static_cast<std::size_t>(indent) * depth, ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                out += nlohmann::json(it.key()).dump();
                out += ": ";
                dump_rec(it.value(), out, indent, depth + 1);
            }
            out += "\n";
            out += closing_pad;
            out += "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& item : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                dump_rec(item, out, indent, depth + 1);
            }
            out += "\n";
            out += closing_pad;
            out += "]";
            return;
        }
        case nlohmann::json::value_t::number_float:
            out += format_sig12(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

std::string dump_canonical(const nlohmann::json& j, int indent) {
    std::string out;
    dump_rec(j, out, indent, 0);
    return out;
}

nlohmann::json rho_to_json(const ComplexMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

ComplexMatrix rho_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) {
        throw Error(ErrorCode::IoError, "density matrix JSON must be a non-empty array of rows");
    }
    const auto d = static_cast<Eigen::Index>(j.size());
    ComplexMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const auto& row = j.at(i);
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
            throw Error(ErrorCode::IoError, "density matrix JSON rows must all have length d");
        }
        for (Eigen::Index k = 0; k < d; ++k) {
            const auto& pair = row.at(k);
            if (!pair.is_array() || pair.size() != 2) {
                throw Error(ErrorCode::IoError, "matrix entries must be [re, im] pairs");
            }
            m(i, k) = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
        }
    }
    return m;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path);
    }
    out << text;
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed for " + path);
    }
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

}  // namespace qbat
