// Acceptance harness: runs every property suite at the pinned tolerances and
// prints one pass/fail line per criterion. Exits nonzero when any fails.

#include <iostream>

#include "flagsim/io.hpp"
#include "flagsim/suites.hpp"

int main() {
    using namespace flagsim;

    suites::SuiteOptions opts;  // seeds 0..49, nv 256, threads from FLAGSIM_THREADS
    const auto results = suites::run_suites(suites::suite_names(), opts);

    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name
                  << "): " << r.details.dump() << "\n";
        all = all && r.pass;
    }
    std::cout << (all ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << " (" << results.size()
              << " criteria)\n";
    return all ? 0 : 1;
}
