#include "invtree/suite.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "invtree/io.hpp"

namespace invtree {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<int> parse_criteria_list(const std::string& value, int lineno) {
    std::vector<int> out;
    if (value == "all") {
        for (int i = 1; i <= kCriterionCount; ++i) out.push_back(i);
        return out;
    }
    if (value == "none" || value.empty()) return out;
    std::istringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        std::size_t pos = 0;
        int id = 0;
        try {
            id = std::stoi(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || id < 1 || id > kCriterionCount)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": bad criterion id '" + item + "'");
        out.push_back(id);
    }
    return out;
}

}  // namespace

SuiteOptions parse_suite_config(const std::string& text) {
    SuiteOptions opt;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "harness.seed") {
            try {
                opt.seed = parse_seed(value);
            } catch (const std::exception& e) {
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
            }
        } else if (key == "harness.threads") {
            opt.threads = static_cast<unsigned>(std::stoul(value));
        } else if (key == "harness.out_dir") {
            opt.out_dir = value;
        } else if (key == "suite.criteria") {
            opt.criteria = parse_criteria_list(value, lineno);
        } else {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" +
                                        key + "'");
        }
    }
    return opt;
}

int run_suite(const SuiteOptions& opt) {
    std::filesystem::create_directories(opt.out_dir);
    std::ofstream report(std::filesystem::path(opt.out_dir) / "report.csv");
    CsvWriter csv(report, opt.seed, {"criterion", "name", "pass", "detail"});
    bool all_pass = true;
    for (int id : opt.criteria) {
        const CriterionResult r = run_criterion(id, opt);
        all_pass = all_pass && r.pass;
        std::printf("[%s] C%02d %s: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.detail.c_str());
        std::fflush(stdout);
        csv.row({CsvWriter::cell(static_cast<std::int64_t>(r.id)), r.name,
                 r.pass ? "pass" : "fail", r.detail});
    }
    return all_pass ? 0 : 2;
}

}  // namespace invtree
