// Acceptance suite: one pass/fail line per criterion. A nonzero exit code
// means at least one selected criterion failed.

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "freqlab/experiment.hpp"

int main(int argc, char** argv) {
    uint64_t seed = 2026;
    int threads = 4;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) {
            ids.push_back(std::atoi(argv[++i]));
        } else if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) {
            seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (!std::strcmp(argv[i], "--threads") && i + 1 < argc) {
            threads = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]... [--seed S] [--threads N]\n", argv[0]);
            return 2;
        }
    }
    if (ids.empty())
        for (int i = 1; i <= 11; ++i) ids.push_back(i);

    bool all = true;
    for (int id : ids) {
        freqlab::CriterionResult r = freqlab::run_criterion(id, seed, threads, "acceptance-scratch");
        std::printf("%s C%d %s: %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.details.c_str(), r.seconds);
        std::fflush(stdout);
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
