// Benchmark comparing the serial reference path against the OpenMP kernels
// on the heavy pipeline stages. The two paths produce identical exact
// results (see tests/test_parallel.cpp); this target measures the speedup.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "ewcheck/catalog.hpp"
#include "ewcheck/generators.hpp"
#include "ewcheck/numeric.hpp"
#include "ewcheck/parallel.hpp"

using namespace ew;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn) {
    auto t0 = Clock::now();
    fn();
    auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void row(const char* name, const std::function<void()>& fn) {
    par::set_parallel(false);
    double serial = time_ms(fn);
    par::set_parallel(true);
    double parallel = time_ms(fn);
    std::printf("%-34s %10.1f ms %10.1f ms %8.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
    int structures = argc > 1 ? std::atoi(argv[1]) : 12;

    std::printf("%-34s %13s %13s %9s\n", "task", "serial", "openmp", "speedup");
    std::printf("%s\n", std::string(72, '-').c_str());

    row("case2 full curvature report", [] {
        WeylStructure s = case2();
        (void)compute_report(s);
    });

    row("toda full curvature report", [] {
        WeylStructure s = toda_structure();
        (void)compute_report(s);
    });

    row(("bianchi batch (" + std::to_string(structures) + " random structures)").c_str(), [structures] {
        for (int i = 0; i < structures; ++i) {
            WeylStructure s = random_weyl_structure(0xb1a2c400 + i);
            if (!bianchi_residual(s).all_zero()) std::printf("  !! bianchi nonzero (bug)\n");
        }
    });

    row("crosscheck case1 (8 points)", [] {
        WeylStructure s = case1();
        auto points = random_sample_points(s, 8, 42);
        CrossCheckReport cc = cross_check(s, points, 1e-5);
        if (!cc.pass) std::printf("  !! crosscheck failed\n");
    });

    std::printf("workers when parallel: %d\n", par::worker_count());
    return 0;
}
