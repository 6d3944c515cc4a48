#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace invtree {

inline constexpr const char* kVersion = "0.1.0";

/// RFC-4180-style CSV with LF line endings and a leading versioned comment
/// line "# invade-tree v<semver> seed=<hex>". Numbers are emitted with 17
/// significant digits so identical runs are byte-identical.
class CsvWriter {
  public:
    CsvWriter(std::ostream& out, std::uint64_t seed, std::vector<std::string> columns);

    void row(const std::vector<std::string>& cells);
    void comment(const std::string& text);

    static std::string cell(double v);
    static std::string cell(std::int64_t v);
    static std::string escape(const std::string& raw);

  private:
    std::ostream& out_;
    std::size_t width_;
};

std::string seed_hex(std::uint64_t seed);

/// Parses a 64-bit seed given as hex (with or without 0x) or decimal.
std::uint64_t parse_seed(const std::string& text);

}  // namespace invtree
