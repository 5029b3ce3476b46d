// Compares the OpenMP kernels against their serial references: same
// arithmetic, so outputs must match bitwise; the interesting number is the
// speedup. Sizes roughly match a face-recognition run (hundreds of samples,
// ~1k feature dims).

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "subspace/dataset.hpp"
#include "subspace/features.hpp"
#include "subspace/kernels.hpp"

using namespace subspace;
namespace chrono = std::chrono;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
    fn(); // warm-up
    const auto start = chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) fn();
    const auto elapsed = chrono::duration<double, std::milli>(chrono::steady_clock::now() - start);
    return elapsed.count() / repeats;
}

void report(const char* name, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-18s serial %8.2f ms   omp %8.2f ms   speedup %4.2fx   %s\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms, equal ? "outputs equal" : "OUTPUT MISMATCH");
}

} // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    detail::Rng rng(4242);

    const int n = 600, m = 512;
    Eigen::MatrixXd x(m, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) x(i, j) = rng.normal();

    {
        Eigen::MatrixXd serial_out, parallel_out;
        const double s = time_ms([&] { serial_out = kernels::serial::pairwise_dot(x); }, 3);
        const double p = time_ms([&] { parallel_out = kernels::pairwise_dot(x); }, 3);
        report("pairwise_dot", s, p, serial_out == parallel_out);
    }
    {
        Eigen::MatrixXd serial_out, parallel_out;
        const double s = time_ms([&] { serial_out = kernels::serial::pairwise_sqdist(x); }, 3);
        const double p = time_ms([&] { parallel_out = kernels::pairwise_sqdist(x); }, 3);
        report("pairwise_sqdist", s, p, serial_out == parallel_out);
    }
    {
        const Eigen::MatrixXd a = x.leftCols(400);
        const Eigen::MatrixXd b = x.rightCols(200);
        Eigen::MatrixXd serial_out, parallel_out;
        const double s = time_ms([&] { serial_out = kernels::serial::cross_sqdist(a, b); }, 3);
        const double p = time_ms([&] { parallel_out = kernels::cross_sqdist(a, b); }, 3);
        report("cross_sqdist", s, p, serial_out == parallel_out);
    }
    {
        Eigen::MatrixXd img(720, 720);
        for (int j = 0; j < 720; ++j)
            for (int i = 0; i < 720; ++i) img(i, j) = rng.unit();
        const auto& bins = lbp_uniform_bins();
        Eigen::MatrixXi serial_out, parallel_out;
        const double s = time_ms([&] { serial_out = kernels::serial::lbp_code_map(img, bins); }, 5);
        const double p = time_ms([&] { parallel_out = kernels::lbp_code_map(img, bins); }, 5);
        report("lbp_code_map", s, p, serial_out == parallel_out);
    }
    return 0;
}
