#include "irslp/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace irslp {

SerEstimate estimate_ser(const Codebook& codebook, const CombinerSet* combiners,
                         const ChannelSet& channels, const Constellation& c, double snr_db,
                         double power_scale, int draws, PhiloxStream& noise_stream) {
    if (draws < 1) throw std::invalid_argument("estimate_ser: draws must be >= 1");
    if (channels.Nr > 1 && combiners == nullptr)
        throw std::invalid_argument("estimate_ser: combiners required for Nr > 1");
    const auto symbol_vectors = enumerate_symbol_vectors(c.M, channels.K);
    const std::size_t mcount = symbol_vectors.size();
    if (codebook.entries.size() != mcount)
        throw std::invalid_argument("estimate_ser: codebook size != M^K");

    const double power = power_scale * std::pow(10.0, snr_db / 10.0);
    const double amp = std::sqrt(power / static_cast<double>(channels.N));

    std::vector<cvec> h_eff(channels.K);
    for (int k = 0; k < channels.K; ++k)
        h_eff[k] = (channels.Nr == 1 && combiners == nullptr)
                       ? channels.miso(k)
                       : effective_channel(channels.users[k], combiners->w[k]);

    // Noise-free receive points, scaled.
    std::vector<std::vector<cd>> z(mcount, std::vector<cd>(channels.K));
    for (std::size_t i = 0; i < mcount; ++i)
        for (int k = 0; k < channels.K; ++k) {
            cd acc{0.0, 0.0};
            for (int n = 0; n < channels.N; ++n)
                acc += std::conj(h_eff[k][n]) * codebook.entries[i][n];
            z[i][k] = amp * acc;
        }

    SerEstimate est;
    est.errors_per_user.assign(channels.K, 0);
    est.errors_per_m.assign(mcount, 0);
    est.trials_per_user = mcount * static_cast<std::uint64_t>(draws);

    for (std::size_t i = 0; i < mcount; ++i) {
        const SymbolVector& sv = symbol_vectors[i];
        for (int d = 0; d < draws; ++d) {
            for (int k = 0; k < channels.K; ++k) {
                const cd r = z[i][k] + awgn(channels.sigma[k], noise_stream);
                if (detect_psk(r, c) != sv.digits[k]) {
                    ++est.errors_per_user[k];
                    ++est.errors_per_m[i];
                }
            }
        }
    }

    est.ser_per_user.resize(channels.K);
    std::uint64_t total_err = 0;
    for (int k = 0; k < channels.K; ++k) {
        est.ser_per_user[k] =
            static_cast<double>(est.errors_per_user[k]) / static_cast<double>(est.trials_per_user);
        total_err += est.errors_per_user[k];
    }
    const double total_trials = static_cast<double>(est.trials_per_user) * channels.K;
    est.ser_mean = static_cast<double>(total_err) / total_trials;
    est.ser_stderr = std::sqrt(std::max(0.0, est.ser_mean * (1.0 - est.ser_mean) / total_trials));
    return est;
}

namespace {

using nlohmann::json;

std::vector<int> as_int_list(const json& v, const std::string& key) {
    std::vector<int> out;
    if (v.is_array()) {
        for (const auto& e : v) out.push_back(e.get<int>());
    } else {
        out.push_back(v.get<int>());
    }
    if (out.empty()) throw std::invalid_argument("config: '" + key + "' must not be empty");
    return out;
}

std::vector<double> as_double_list(const json& v, const std::string& key) {
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& e : v) out.push_back(e.get<double>());
    } else {
        out.push_back(v.get<double>());
    }
    if (out.empty()) throw std::invalid_argument("config: '" + key + "' must not be empty");
    return out;
}

std::vector<std::string> as_string_list(const json& v, const std::string& key) {
    std::vector<std::string> out;
    if (v.is_array()) {
        for (const auto& e : v) out.push_back(e.get<std::string>());
    } else {
        out.push_back(v.get<std::string>());
    }
    if (out.empty()) throw std::invalid_argument("config: '" + key + "' must not be empty");
    return out;
}

} // namespace

SweepConfig SweepConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");

    SweepConfig cfg;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "modulation")
                cfg.modulation = value.get<int>();
            else if (key == "users")
                cfg.users = as_int_list(value, key);
            else if (key == "elements")
                cfg.elements = as_int_list(value, key);
            else if (key == "receive_antennas")
                cfg.receive_antennas = as_int_list(value, key);
            else if (key == "schemes")
                cfg.schemes = as_string_list(value, key);
            else if (key == "snr_db")
                cfg.snr_db = as_double_list(value, key);
            else if (key == "realizations")
                cfg.realizations = value.get<int>();
            else if (key == "draws")
                cfg.draws = value.get<int>();
            else if (key == "seed")
                cfg.seed = value.get<std::uint64_t>();
            else if (key == "output")
                cfg.output = value.get<std::string>();
            else if (key == "power_mode")
                cfg.power_mode = value.get<std::string>();
            else if (key == "rcg_restarts")
                cfg.rcg_restarts = value.get<int>();
            else if (key == "alternating_max_iters")
                cfg.alternating_max_iters = value.get<int>();
            else if (key == "alternating_delta_th")
                cfg.alternating_delta_th = value.get<double>();
            else if (key == "bnb_node_budget")
                cfg.bnb_node_budget = value.get<std::uint64_t>();
            else
                throw std::invalid_argument("config: unknown key '" + key + "'");
        } catch (const json::exception& e) {
            throw std::invalid_argument("config: bad value for '" + key + "': " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

SweepConfig SweepConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

void SweepConfig::validate() const {
    if (modulation < 3) throw std::invalid_argument("config: modulation must be >= 3");
    if (users.empty()) throw std::invalid_argument("config: 'users' must not be empty");
    if (elements.empty()) throw std::invalid_argument("config: 'elements' must not be empty");
    if (receive_antennas.empty())
        throw std::invalid_argument("config: 'receive_antennas' must not be empty");
    if (schemes.empty()) throw std::invalid_argument("config: 'schemes' must not be empty");
    if (snr_db.empty()) throw std::invalid_argument("config: 'snr_db' must not be empty");
    if (realizations < 1) throw std::invalid_argument("config: realizations must be >= 1");
    if (draws < 1) throw std::invalid_argument("config: draws must be >= 1");
    if (output.empty()) throw std::invalid_argument("config: 'output' path is required");
    if (power_mode != "total" && power_mode != "per_user")
        throw std::invalid_argument("config: power_mode must be 'total' or 'per_user'");
    if (rcg_restarts < 0) throw std::invalid_argument("config: rcg_restarts must be >= 0");
    if (alternating_max_iters < 0)
        throw std::invalid_argument("config: alternating_max_iters must be >= 0");
    for (int k : users) {
        if (k < 1) throw std::invalid_argument("config: user counts must be >= 1");
        enumerate_symbol_vectors(modulation, k); // throws beyond the cap
    }
    for (int n : elements)
        if (n < 1) throw std::invalid_argument("config: element counts must be >= 1");
    for (int nr : receive_antennas)
        if (nr < 1) throw std::invalid_argument("config: receive antenna counts must be >= 1");
    for (const std::string& s : schemes) Scheme::parse(s);
}

std::string csv_header() {
    return "scheme,B,N,K,Nr,snr_db,ser_mean,ser_stderr,realizations,draws,wall_time_s,seed";
}

namespace {

std::string fmt_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace

std::string csv_line(const SerRecord& r) {
    std::ostringstream out;
    out << r.scheme << ',' << r.bits << ',' << r.N << ',' << r.K << ',' << r.Nr << ','
        << fmt_g9(r.snr_db) << ',' << fmt_g9(r.ser_mean) << ',' << fmt_g9(r.ser_stderr) << ','
        << r.realizations << ',' << r.draws << ',' << fmt_g9(r.wall_time_s) << ',' << r.seed;
    return out.str();
}

void write_csv_atomic(const std::string& path, const std::vector<SerRecord>& records) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << csv_header() << '\n';
        for (const SerRecord& r : records) out << csv_line(r) << '\n';
        out.flush();
        if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
}

void apply_thread_env() {
    if (const char* env = std::getenv("IRSLP_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) omp_set_num_threads(n);
    }
}

namespace {

struct Cell {
    std::size_t index = 0;
    int K = 0;
    int N = 0;
    int Nr = 1;
    std::size_t scheme_idx = 0;
    double snr_db = 0.0;
};

constexpr std::uint64_t kDesignPurpose = 0xD5;

} // namespace

std::vector<SerRecord> run_sweep(const SweepConfig& config, bool parallel,
                                 std::ostream* progress) {
    config.validate();

    // Fail on an unwritable output before any computation.
    if (!config.output.empty()) {
        const std::string tmp = config.output + ".tmp";
        std::ofstream probe(tmp, std::ios::trunc);
        if (!probe) throw std::runtime_error("output path not writable: '" + config.output + "'");
        probe.close();
        std::remove(tmp.c_str());
    }

    const Constellation cons = make_constellation(config.modulation);
    std::vector<Scheme> schemes;
    for (const std::string& s : config.schemes) schemes.push_back(Scheme::parse(s));

    // Cell enumeration order fixes the per-cell noise substreams.
    std::vector<Cell> cells;
    for (int K : config.users)
        for (int N : config.elements)
            for (int Nr : config.receive_antennas)
                for (std::size_t si = 0; si < schemes.size(); ++si)
                    for (double snr : config.snr_db)
                        cells.push_back(
                            {cells.size(), K, N, Nr, si, snr});

    std::vector<SerRecord> records(cells.size());
    std::vector<std::uint64_t> cell_errors(cells.size(), 0);
    std::vector<std::uint64_t> cell_trials(cells.size(), 0);
    std::vector<double> cell_wall(cells.size(), 0.0);

    DesignOptions design_opts;
    design_opts.phase.restarts = config.rcg_restarts;
    design_opts.bnb.node_budget = config.bnb_node_budget;
    AlternatingConfig alt_cfg;
    alt_cfg.design = design_opts;
    alt_cfg.n_max = config.alternating_max_iters;
    alt_cfg.delta_th = config.alternating_delta_th;

    for (int K : config.users) {
        for (int N : config.elements) {
            for (int Nr : config.receive_antennas) {
                std::vector<std::size_t> combo_cells;
                for (const Cell& cell : cells)
                    if (cell.K == K && cell.N == N && cell.Nr == Nr)
                        combo_cells.push_back(cell.index);
                const double power_scale =
                    config.power_mode == "per_user" ? static_cast<double>(K) : 1.0;

                double design_wall = 0.0;
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : design_wall) if (parallel)
                for (int r = 0; r < config.realizations; ++r) {
                    const std::uint64_t ch_seed = derive_seed(
                        config.seed, {stream_tag::channels, static_cast<std::uint64_t>(K),
                                      static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(Nr),
                                      static_cast<std::uint64_t>(r)});
                    const ChannelSet channels = sample_channels(N, K, Nr, ch_seed);
                    const std::uint64_t design_seed = derive_seed(
                        config.seed, {kDesignPurpose, static_cast<std::uint64_t>(K),
                                      static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(Nr),
                                      static_cast<std::uint64_t>(r)});

                    const double t_design0 = omp_get_wtime();
                    std::vector<Codebook> books(schemes.size());
                    std::vector<CombinerSet> combiners(schemes.size());
                    if (Nr == 1) {
                        // One continuous relaxation per m, shared by every scheme.
                        const auto svs = enumerate_symbol_vectors(cons.M, K);
                        std::vector<cvec> h_eff(K);
                        for (int k = 0; k < K; ++k) h_eff[k] = channels.miso(k);
                        std::vector<PhaseSolveResult> cont(svs.size());
                        for (std::size_t i = 0; i < svs.size(); ++i) {
                            PhiloxStream init_stream = make_stream(
                                design_seed, {stream_tag::phase_init, 0, svs[i].m});
                            std::vector<cd> symbols(K);
                            for (int k = 0; k < K; ++k) symbols[k] = symbol_of(cons, svs[i], k);
                            cont[i] = design_phase_vector(h_eff, symbols, cons.phi,
                                                          design_opts.phase, init_stream);
                        }
                        for (std::size_t si = 0; si < schemes.size(); ++si) {
                            books[si].scheme = schemes[si];
                            books[si].entries.resize(svs.size());
                            books[si].margins.resize(svs.size());
                            for (std::size_t i = 0; i < svs.size(); ++i) {
                                std::vector<cd> symbols(K);
                                for (int k = 0; k < K; ++k)
                                    symbols[k] = symbol_of(cons, svs[i], k);
                                EntryDesign e = finish_entry(cont[i], h_eff, symbols, cons.phi,
                                                             schemes[si], design_opts.bnb);
                                books[si].entries[i] = std::move(e.theta);
                                books[si].margins[i] = e.margin;
                            }
                            combiners[si].w.assign(K, cvec{cd{1.0, 0.0}});
                        }
                    } else {
                        for (std::size_t si = 0; si < schemes.size(); ++si) {
                            AlternatingResult alt = alternating_design(
                                channels, cons, schemes[si], alt_cfg, design_seed, false);
                            books[si] = std::move(alt.codebook);
                            combiners[si] = std::move(alt.combiners);
                        }
                    }
                    design_wall += omp_get_wtime() - t_design0;

                    for (std::size_t ci : combo_cells) {
                        const Cell& cell = cells[ci];
                        PhiloxStream noise = make_stream(
                            config.seed, {stream_tag::noise, static_cast<std::uint64_t>(cell.index),
                                          static_cast<std::uint64_t>(r)});
                        const double t0 = omp_get_wtime();
                        SerEstimate est = estimate_ser(
                            books[cell.scheme_idx], &combiners[cell.scheme_idx], channels, cons,
                            cell.snr_db, power_scale, config.draws, noise);
                        const double dt = omp_get_wtime() - t0;
                        std::uint64_t err = 0;
                        for (std::uint64_t e : est.errors_per_user) err += e;
#pragma omp critical(irslp_sweep_accumulate)
                        {
                            cell_errors[ci] += err;
                            cell_trials[ci] += est.trials_per_user * K;
                            cell_wall[ci] += dt;
                        }
                    }
                }

                const double design_share =
                    combo_cells.empty() ? 0.0 : design_wall / combo_cells.size();
                for (std::size_t ci : combo_cells) {
                    const Cell& cell = cells[ci];
                    SerRecord& rec = records[ci];
                    rec.scheme = schemes[cell.scheme_idx].label;
                    rec.bits = schemes[cell.scheme_idx].bits_label();
                    rec.N = cell.N;
                    rec.K = cell.K;
                    rec.Nr = cell.Nr;
                    rec.snr_db = cell.snr_db;
                    const double trials = static_cast<double>(cell_trials[ci]);
                    rec.ser_mean = static_cast<double>(cell_errors[ci]) / trials;
                    rec.ser_stderr =
                        std::sqrt(std::max(0.0, rec.ser_mean * (1.0 - rec.ser_mean) / trials));
                    rec.realizations = config.realizations;
                    rec.draws = config.draws;
                    rec.wall_time_s = cell_wall[ci] + design_share;
                    rec.seed = config.seed;
                    if (progress != nullptr)
                        *progress << "cell " << (ci + 1) << "/" << cells.size() << " " << csv_line(rec)
                                  << '\n';
                }
            }
        }
    }

    if (!config.output.empty()) write_csv_atomic(config.output, records);
    return records;
}

} // namespace irslp
