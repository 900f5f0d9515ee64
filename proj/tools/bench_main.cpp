// Timing comparison of the OpenMP kernels against their serial reference
// implementations. The pairs must agree bitwise; the speedup is the point.

#include <omp.h>

#include <cstdio>
#include <string>

#include "irslp/harness.hpp"

using namespace irslp;

namespace {

struct Timing {
    double serial_s = 0.0;
    double parallel_s = 0.0;
};

void report(const char* name, const Timing& t, bool match) {
    std::printf("%-28s serial %8.3f s   openmp %8.3f s   speedup %4.2fx   %s\n", name, t.serial_s,
                t.parallel_s, t.serial_s / t.parallel_s, match ? "results match" : "MISMATCH");
}

bool same_codebook(const Codebook& a, const Codebook& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        if (a.entries[i] != b.entries[i]) return false;
    return true;
}

} // namespace

int main(int argc, char** argv) {
    apply_thread_env();
    int N = 32, K = 2, M = 4;
    std::uint64_t seed = 7;
    if (argc > 1) N = std::stoi(argv[1]);
    if (argc > 2) K = std::stoi(argv[2]);

    std::printf("threads: %d\n", omp_get_max_threads());
    const Constellation cons = make_constellation(M);
    const ChannelSet channels = sample_channels(N, K, 1, seed);

    {
        Timing t;
        const Scheme scheme = Scheme::parse("inf");
        DesignOptions opts;
        double t0 = omp_get_wtime();
        const Codebook serial = design_codebook_serial(channels, cons, scheme, opts, seed);
        t.serial_s = omp_get_wtime() - t0;
        t0 = omp_get_wtime();
        const Codebook parallel = design_codebook(channels, cons, scheme, opts, seed);
        t.parallel_s = omp_get_wtime() - t0;
        report("codebook design", t, same_codebook(serial, parallel));
    }

    {
        Timing t;
        SweepConfig cfg;
        cfg.modulation = M;
        cfg.users = {K};
        cfg.elements = {N};
        cfg.schemes = {"2"};
        cfg.snr_db = {0.0, 4.0};
        cfg.realizations = 24;
        cfg.draws = 50;
        cfg.seed = seed;
        cfg.output = "bench_sweep.csv";
        double t0 = omp_get_wtime();
        const auto serial = run_sweep(cfg, false);
        t.serial_s = omp_get_wtime() - t0;
        t0 = omp_get_wtime();
        const auto parallel = run_sweep(cfg, true);
        t.parallel_s = omp_get_wtime() - t0;
        bool match = serial.size() == parallel.size();
        if (match)
            for (std::size_t i = 0; i < serial.size(); ++i)
                match = match && serial[i].ser_mean == parallel[i].ser_mean &&
                        serial[i].ser_stderr == parallel[i].ser_stderr;
        report("ser sweep", t, match);
    }

    {
        Timing t;
        PhiloxStream gen = make_stream(seed, {stream_tag::test, 9});
        std::vector<cvec> c(16, cvec(2));
        for (auto& cm : c)
            for (auto& v : cm) v = gen.cgauss();
        const double step = 0.02;
        double t0 = omp_get_wtime();
        const double serial = combiner_grid_search2_serial(c, cons.phi, step);
        t.serial_s = omp_get_wtime() - t0;
        t0 = omp_get_wtime();
        const double parallel = combiner_grid_search2(c, cons.phi, step);
        t.parallel_s = omp_get_wtime() - t0;
        report("combiner grid oracle", t, serial == parallel);
    }

    return 0;
}
