#include "invtree/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace invtree {

std::string seed_hex(std::uint64_t seed) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(seed));
    return buf;
}

std::uint64_t parse_seed(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("seed: empty");
    const bool hex = (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) ||
                     text.find_first_of("abcdefABCDEF") != std::string::npos;
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(text, &pos, hex ? 16 : 10);
    if (pos != text.size()) throw std::invalid_argument("seed: trailing characters in '" + text + "'");
    return v;
}

CsvWriter::CsvWriter(std::ostream& out, std::uint64_t seed, std::vector<std::string> columns)
    : out_(out), width_(columns.size()) {
    out_ << "# invade-tree v" << kVersion << " seed=" << seed_hex(seed) << "\n";
    row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::invalid_argument("CsvWriter: wrong cell count");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << escape(cells[i]);
    }
    out_ << '\n';
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

std::string CsvWriter::cell(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CsvWriter::cell(std::int64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
}

std::string CsvWriter::escape(const std::string& raw) {
    if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
    std::string quoted = "\"";
    for (char c : raw) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

}  // namespace invtree
