#include "kreinamo/acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

int main(int argc, char** argv) {
    kreinamo::AcceptanceOptions opt;
    opt.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("KREINAMO_WORKERS")) opt.workers = std::max(1, std::atoi(env));
    for (int i = 1; i < argc; ++i) opt.only.emplace_back(argv[i]);

    int failed = 0;
    const auto results = kreinamo::run_acceptance(opt, [&](const kreinamo::CriterionResult& r) {
        std::cout << kreinamo::format_result(r) << std::endl;
        if (!r.passed) ++failed;
    });
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
