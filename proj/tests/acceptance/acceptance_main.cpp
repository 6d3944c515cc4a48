// Acceptance suite: one pass/fail line per criterion, exit 0 only if all
// selected criteria pass.

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "invtree/io.hpp"
#include "invtree/parallel.hpp"
#include "invtree/suite.hpp"

int main(int argc, char** argv) {
    invtree::SuiteOptions opt;
    opt.threads = invtree::default_threads();
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        auto next = [&]() -> const char* {
            if (i + 1 >= argc) {
                std::fprintf(stderr, "missing value after %s\n", arg.c_str());
                std::exit(1);
            }
            return argv[++i];
        };
        if (arg == "--only") {
            selected.push_back(std::atoi(next()));
        } else if (arg == "--seed") {
            opt.seed = invtree::parse_seed(next());
        } else if (arg == "--threads") {
            opt.threads = static_cast<unsigned>(std::atoi(next()));
        } else if (arg == "--list") {
            for (int id = 1; id <= invtree::kCriterionCount; ++id)
                std::printf("C%02d %s\n", id, invtree::criterion_name(id));
            return 0;
        } else {
            std::fprintf(stderr, "usage: %s [--only N]... [--seed S] [--threads T] [--list]\n",
                         argv[0]);
            return 1;
        }
    }
    if (selected.empty())
        for (int id = 1; id <= invtree::kCriterionCount; ++id) selected.push_back(id);

    bool all_pass = true;
    for (int id : selected) {
        const invtree::CriterionResult r = invtree::run_criterion(id, opt);
        all_pass = all_pass && r.pass;
        std::printf("[%s] C%02d %s: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.detail.c_str());
        std::fflush(stdout);
    }
    return all_pass ? 0 : 2;
}
