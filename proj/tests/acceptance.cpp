#include <iostream>
#include <thread>

#include "selftest.hpp"

int main(int argc, char** argv) {
    wittlab::SelftestOptions opt;
    opt.jobs = static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency())));
    for (int i = 1; i < argc; ++i) opt.only.push_back(std::stoi(argv[i]));
    int failed = 0;
    auto results = wittlab::run_selftest(opt, [&](const wittlab::CriterionResult& r) {
        std::cout << r.line() << std::endl;
        failed += !r.pass;
    });
    std::cout << (results.size() - failed) << " of " << results.size() << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
