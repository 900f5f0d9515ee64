#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "irslp/mimo.hpp"

namespace irslp {

// Error counts from one channel realization: for every symbol vector m,
// `draws` noisy receives per user, detected independently.
struct SerEstimate {
    std::vector<std::uint64_t> errors_per_user;
    std::vector<std::uint64_t> errors_per_m;
    std::uint64_t trials_per_user = 0; // M^K * draws
    std::vector<double> ser_per_user;
    double ser_mean = 0.0;
    double ser_stderr = 0.0;
};

// Received value r = sqrt(P/N) h^H theta_m + n with P = power_scale *
// 10^(snr_db/10) (SNR = P/sigma^2 with sigma = 1). For multi-antenna
// receivers the combiner is applied first: h = H_k w_k, noise added after
// combining. Detection is plain nearest-phase PSK on r.
SerEstimate estimate_ser(const Codebook& codebook, const CombinerSet* combiners,
                         const ChannelSet& channels, const Constellation& c, double snr_db,
                         double power_scale, int draws, PhiloxStream& noise_stream);

struct SweepConfig {
    int modulation = 4;
    std::vector<int> users;
    std::vector<int> elements;
    std::vector<int> receive_antennas = {1};
    std::vector<std::string> schemes;
    std::vector<double> snr_db;
    int realizations = 200;
    int draws = 100;
    std::uint64_t seed = 1;
    std::string output;
    std::string power_mode = "total"; // "per_user": P = K * 10^(snr/10)

    int rcg_restarts = 3;
    int alternating_max_iters = 20;
    double alternating_delta_th = 1e-3;
    std::uint64_t bnb_node_budget = 1'000'000;

    // Strict parsing: unknown keys are rejected.
    static SweepConfig from_json_text(const std::string& text);
    static SweepConfig from_json_file(const std::string& path);
    void validate() const;
};

struct SerRecord {
    std::string scheme;
    std::string bits; // "inf" or bit count
    int N = 0;
    int K = 0;
    int Nr = 1;
    double snr_db = 0.0;
    double ser_mean = 0.0;
    double ser_stderr = 0.0;
    int realizations = 0;
    int draws = 0;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
};

std::string csv_header();
std::string csv_line(const SerRecord& r);

// Full cartesian sweep (users x elements x receive_antennas x schemes x
// snr_db). Writes the CSV atomically when config.output is set; identical
// configs reproduce identical records (wall time aside) for any thread
// count. Substream discipline: channels keyed by (K, N, Nr, realization) so
// all schemes and SNR points of one realization share channels and designs;
// noise keyed by (cell index, realization).
std::vector<SerRecord> run_sweep(const SweepConfig& config, bool parallel = true,
                                 std::ostream* progress = nullptr);

void write_csv_atomic(const std::string& path, const std::vector<SerRecord>& records);

// Honor the IRSLP_THREADS override (default: machine parallelism).
void apply_thread_env();

} // namespace irslp
