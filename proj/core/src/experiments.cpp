#include "trellisml/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "trellisml/rng.hpp"

namespace trellisml {

namespace {

constexpr uint64_t kSaltMessage = 0x6d736773ULL;
constexpr uint64_t kSaltWindow = 0x77696e64ULL;

uint64_t trial_key(int N, uint64_t trial) {
    return splitmix64((static_cast<uint64_t>(N) << 40) ^ 0x74726b65ULL) ^ trial;
}

uint64_t checked_pow(uint64_t base, int e, uint64_t limit) {
    uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > limit / base) return limit + 1;
        r *= base;
    }
    return r;
}

Message draw_message(const Trellis& tr, const TrialRng& rng) {
    const int N = tr.N();
    Message msg;
    msg.k = tr.code().k();
    msg.sym.assign(static_cast<size_t>(N) * msg.k, 0);
    for (int d = 0; d < N; ++d) {
        const uint32_t a = static_cast<uint32_t>(
            rng.uniform_below(tr.num_inputs(), static_cast<uint64_t>(d), kSaltMessage));
        tr.input_symbols(a, &msg.at(d, 0));
    }
    return msg;
}

void parallel_trials(int trials, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, threads);
    if (threads == 1 || trials <= 1) {
        for (int t = 0; t < trials; ++t) body(t);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= trials) return;
            try {
                body(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min(threads, trials);
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (v.empty()) return {0, 0};
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0};
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string sig9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string cell_tag(double snr, int N) {
    return "snr=" + sig9(snr) + ",N=" + std::to_string(N);
}

// Hard check used wherever the exhaustive oracle fits in budget: certified-ML
// decoders must reproduce its metric and, with the shared tie-break, its
// message.
void assert_against_oracle(const DecodeResult& oracle, const Message& msg, double metric,
                           const std::string& who) {
    if (std::abs(metric - oracle.metric) > 1e-9) {
        throw contract_error(who + " metric " + sig9(metric) +
                             " differs from brute force " + sig9(oracle.metric));
    }
    if (!(msg == oracle.message)) {
        throw contract_error(who + " message differs from brute force under the tie-break");
    }
}

}  // namespace

GeneratorMatrix CodeSpec::build() const {
    if (!octal.empty()) {
        return GeneratorMatrix::from_octal(q, octal);
    }
    return GeneratorMatrix(PrimeField(q), k, n, nu, taps);
}

SymbolMapper TrialConfig::build_mapper() const {
    if (map) return SymbolMapper(*map);
    return SymbolMapper::pam(code.q);
}

NllParams TrialConfig::build_nll_params() const {
    const GeneratorMatrix g = code.build();
    const SymbolMapper mapper = build_mapper();
    const auto dist = signal_distances(mapper, g.n());
    const double use_xi = xi.value_or(dist.d_min2 / 4);
    int use_M;
    if (M) {
        use_M = *M;
    } else {
        use_M = static_cast<int>(std::floor(g.nu() * dist.d_max2 / (3 * use_xi))) + 1;
    }
    return NllParams::validated(use_xi, use_M, dist.d_min2, dist.d_max2, g.nu());
}

TrialRecord run_trial(const TrialConfig& cfg, int N, double snr, uint64_t trial_index) {
    const GeneratorMatrix code = cfg.code.build();
    const Trellis trellis(code, N);
    const SymbolMapper mapper = cfg.build_mapper();
    const TrialRng rng{cfg.seed, trial_key(N, trial_index)};

    TrialRecord rec;
    rec.trial = trial_index;
    rec.N = N;
    rec.snr = snr;
    rec.transmitted = draw_message(trellis, rng);
    const Codeword cw = encode(rec.transmitted, code);
    const ReceivedSequence rx = transmit(modulate(cw, mapper), NoiseModel::from_snr(snr), rng);
    rec.transmitted_metric = negative_sll(rx, cw, mapper);

    auto push = [&](const std::string& name, const DecodeResult& r) {
        DecoderRun run;
        run.name = name;
        run.metric = r.metric;
        run.visited = r.stats.visited_states;
        run.normalized_visited = r.stats.normalized;
        run.matches_transmitted = r.message == rec.transmitted;
        run.certified_ml = r.certified_ml;
        rec.runs.push_back(std::move(run));
    };

    for (const std::string& name : cfg.decoders) {
        if (name == "viterbi") {
            push(name, viterbi_decode(rx, trellis, mapper));
        } else if (name == "sll_viterbi") {
            const Message guess = cfg.guess == TrialConfig::GuessMode::ideal
                                      ? rec.transmitted
                                      : suboptimal_decode(rx, trellis, mapper, cfg.strategy);
            push(name, sll_augmented_viterbi(rx, trellis, mapper, guess));
        } else if (name == "three_step") {
            const ThreeStepResult r = three_step_decode(rx, trellis, mapper,
                                                        cfg.build_nll_params(), cfg.strategy,
                                                        cfg.nll);
            push(name, r.result);
        } else if (name == "brute_force") {
            push(name, brute_force_ml(rx, code, mapper, N, cfg.oracle_budget));
        } else {
            throw config_error("unknown decoder '" + name + "'");
        }
    }

    if (checked_pow(code.q(), code.k() * N, cfg.oracle_budget) <= cfg.oracle_budget) {
        const DecodeResult oracle = brute_force_ml(rx, code, mapper, N, cfg.oracle_budget);
        rec.oracle_metric = oracle.metric;
        for (const DecoderRun& run : rec.runs) {
            if (!run.certified_ml) continue;
            if (std::abs(run.metric - oracle.metric) > 1e-9) {
                throw contract_error("decoder " + run.name + " disagrees with the oracle");
            }
        }
    }
    return rec;
}

SweepResult sll_inefficiency_sweep(const TrialConfig& cfg) {
    if (cfg.guess != TrialConfig::GuessMode::ideal) {
        throw config_error("sll_inefficiency_sweep requires guess = ideal");
    }
    const GeneratorMatrix code = cfg.code.build();
    const SymbolMapper mapper = cfg.build_mapper();

    SweepResult out;
    out.seed = cfg.seed;
    for (int N : cfg.lengths) {
        const Trellis trellis(code, N);
        const bool oracle_ok =
            checked_pow(code.q(), code.k() * N, cfg.oracle_budget) <= cfg.oracle_budget;
        for (double snr : cfg.snrs) {
            std::vector<double> vit_norm(cfg.trials), sll_norm(cfg.trials), ratio(cfg.trials),
                accept(cfg.trials);
            parallel_trials(cfg.trials, cfg.threads, [&](int t) {
                const TrialRng rng{cfg.seed, trial_key(N, static_cast<uint64_t>(t))};
                const Message msg = draw_message(trellis, rng);
                const Codeword cw = encode(msg, code);
                const ReceivedSequence rx =
                    transmit(modulate(cw, mapper), NoiseModel::from_snr(snr), rng);
                const double s_x = negative_sll(rx, cw, mapper);

                // Partial message covering the perturbed window: symbol 0
                // shifted by one field unit, symbols [1, nu) kept.
                Message prefix;
                prefix.k = msg.k;
                const int plen = std::min(code.nu(), N);
                prefix.sym.assign(msg.sym.begin(),
                                  msg.sym.begin() + static_cast<size_t>(plen) * msg.k);
                prefix.at(0, 0) = static_cast<Sym>((prefix.at(0, 0) + 1) % code.q());
                const double s_xl = sphere_branch_lower_bound(rx, prefix, code, mapper);
                accept[t] = s_xl > s_x ? 1.0 : 0.0;

                const DecodeResult vit = viterbi_decode(rx, trellis, mapper);
                const DecodeResult sll = sll_augmented_viterbi(rx, trellis, mapper, msg);
                vit_norm[t] = vit.stats.normalized;
                sll_norm[t] = sll.stats.normalized;
                ratio[t] = static_cast<double>(sll.stats.visited_states) /
                           static_cast<double>(vit.stats.visited_states);
                if (oracle_ok) {
                    const DecodeResult oracle =
                        brute_force_ml(rx, code, mapper, N, cfg.oracle_budget);
                    assert_against_oracle(oracle, vit.message, vit.metric, "viterbi");
                    assert_against_oracle(oracle, sll.message, sll.metric, "sll_viterbi");
                }
            });

            const auto [vm, vs] = mean_std(vit_norm);
            const auto [sm, ss] = mean_std(sll_norm);
            double accepted = 0, in_band = 0;
            for (int t = 0; t < cfg.trials; ++t) {
                accepted += accept[t];
                if (ratio[t] >= 0.9 && ratio[t] <= 1.0) in_band += 1;
            }
            SweepCell vit_cell{"viterbi", snr, N, cfg.trials, vm, vs, {}, {}, {}, {}};
            SweepCell sll_cell{"sll_viterbi", snr, N, cfg.trials, sm, ss, {}, {}, {}, {}};
            if (oracle_ok) {
                vit_cell.ml_match_rate = 1.0;
                sll_cell.ml_match_rate = 1.0;
            }
            sll_cell.sll_accept_rate = accepted / cfg.trials;
            out.cells.push_back(std::move(vit_cell));
            out.cells.push_back(std::move(sll_cell));
            const std::string tag = cell_tag(snr, N);
            out.diagnostics["ratio_mean@" + tag] = mean_std(ratio).first;
            out.diagnostics["ratio_in_0.9_1.0@" + tag] = in_band / cfg.trials;
            out.diagnostics["ratio_median@" + tag] = median(ratio);
        }
    }
    std::sort(out.cells.begin(), out.cells.end(), [](const SweepCell& a, const SweepCell& b) {
        if (a.decoder != b.decoder) return a.decoder < b.decoder;
        if (a.snr != b.snr) return a.snr < b.snr;
        return a.N < b.N;
    });
    return out;
}

SweepResult opt_probability_sweep(const TrialConfig& cfg) {
    const GeneratorMatrix code = cfg.code.build();
    const SymbolMapper mapper = cfg.build_mapper();
    const NllParams params = cfg.build_nll_params();
    const int W = params.window_halfwidth();

    SweepResult out;
    out.seed = cfg.seed;
    for (int N : cfg.lengths) {
        const Trellis trellis(code, N);
        if (N - W <= W) {
            throw config_error("opt_probability_sweep: need N > 2(2M+1)nu = " +
                               std::to_string(2 * W) + " for an interior window");
        }
        for (double snr : cfg.snrs) {
            std::vector<double> opt(cfg.trials);
            parallel_trials(cfg.trials, cfg.threads, [&](int t) {
                const TrialRng rng{cfg.seed, trial_key(N, static_cast<uint64_t>(t))};
                const Message msg = draw_message(trellis, rng);
                const Codeword cw = encode(msg, code);
                const ReceivedSequence rx =
                    transmit(modulate(cw, mapper), NoiseModel::from_snr(snr), rng);
                const int m = W + static_cast<int>(rng.uniform_below(
                                      static_cast<uint64_t>(N - 2 * W), 0, kSaltWindow));
                opt[t] = nll_confirm(rx, cw, m, params, mapper, cfg.nll) ? 1.0 : 0.0;
            });
            double confirmed = 0;
            for (double v : opt) confirmed += v;
            SweepCell cell{"nll_confirm", snr, N, cfg.trials, {}, {}, {}, {}, {}, {}};
            cell.opt_m_rate = confirmed / cfg.trials;
            out.cells.push_back(std::move(cell));
        }
    }
    std::sort(out.cells.begin(), out.cells.end(), [](const SweepCell& a, const SweepCell& b) {
        if (a.decoder != b.decoder) return a.decoder < b.decoder;
        if (a.snr != b.snr) return a.snr < b.snr;
        return a.N < b.N;
    });
    return out;
}

SweepResult complexity_sweep(const TrialConfig& cfg) {
    const GeneratorMatrix code = cfg.code.build();
    const SymbolMapper mapper = cfg.build_mapper();
    const NllParams params = cfg.build_nll_params();

    SweepResult out;
    out.seed = cfg.seed;
    for (int N : cfg.lengths) {
        const Trellis trellis(code, N);
        const bool oracle_ok =
            checked_pow(code.q(), code.k() * N, cfg.oracle_budget) <= cfg.oracle_budget;
        for (double snr : cfg.snrs) {
            std::vector<double> cmva(cfg.trials), cva(cfg.trials), suberr(cfg.trials),
                gap(cfg.trials), singleton(cfg.trials);
            parallel_trials(cfg.trials, cfg.threads, [&](int t) {
                const TrialRng rng{cfg.seed, trial_key(N, static_cast<uint64_t>(t))};
                const Message msg = draw_message(trellis, rng);
                const Codeword cw = encode(msg, code);
                const ReceivedSequence rx =
                    transmit(modulate(cw, mapper), NoiseModel::from_snr(snr), rng);

                const Message guess = suboptimal_decode(rx, trellis, mapper, cfg.strategy);
                int errs = 0;
                for (int d = 0; d < N; ++d) {
                    for (int i = 0; i < msg.k; ++i) {
                        if (guess.at(d, i) != msg.at(d, i)) {
                            ++errs;
                            break;
                        }
                    }
                }
                suberr[t] = static_cast<double>(errs) / N;

                const ThreeStepResult ts =
                    three_step_decode(rx, trellis, mapper, params, cfg.strategy, cfg.nll);
                const DecodeResult vit = viterbi_decode(rx, trellis, mapper);
                cmva[t] = ts.result.stats.normalized;
                cva[t] = vit.stats.normalized;
                singleton[t] = ts.singleton_fraction;
                gap[t] = std::abs(ts.result.metric - vit.metric);
                if (gap[t] > 1e-9) {
                    throw contract_error("three_step metric differs from viterbi by " +
                                         sig9(gap[t]) + " at snr " + sig9(snr));
                }
                if (oracle_ok) {
                    const DecodeResult oracle =
                        brute_force_ml(rx, code, mapper, N, cfg.oracle_budget);
                    assert_against_oracle(oracle, vit.message, vit.metric, "viterbi");
                    assert_against_oracle(oracle, ts.result.message, ts.result.metric,
                                          "three_step");
                }
            });

            const auto [mm, ms] = mean_std(cmva);
            const auto [vm, vs] = mean_std(cva);
            SweepCell ts_cell{"three_step", snr, N, cfg.trials, mm, ms, {}, {}, {}, {}};
            SweepCell vit_cell{"viterbi", snr, N, cfg.trials, vm, vs, {}, {}, {}, {}};
            ts_cell.sub_symbol_err = mean_std(suberr).first;
            if (oracle_ok) {
                ts_cell.ml_match_rate = 1.0;
                vit_cell.ml_match_rate = 1.0;
            }
            out.cells.push_back(std::move(ts_cell));
            out.cells.push_back(std::move(vit_cell));
            const std::string tag = cell_tag(snr, N);
            out.diagnostics["cmva_median@" + tag] = median(cmva);
            out.diagnostics["cmva_max@" + tag] = *std::max_element(cmva.begin(), cmva.end());
            out.diagnostics["metric_gap_max@" + tag] = *std::max_element(gap.begin(), gap.end());
            out.diagnostics["singleton_mean@" + tag] = mean_std(singleton).first;
        }
    }
    std::sort(out.cells.begin(), out.cells.end(), [](const SweepCell& a, const SweepCell& b) {
        if (a.decoder != b.decoder) return a.decoder < b.decoder;
        if (a.snr != b.snr) return a.snr < b.snr;
        return a.N < b.N;
    });
    return out;
}

void write_csv(const SweepResult& result, std::ostream& out) {
    out << "decoder,snr,N,trials,mean_visited_per_t,std_visited_per_t,ml_match_rate,"
           "sub_symbol_err,opt_m_rate,sll_accept_rate,seed\n";
    auto field = [](const std::optional<double>& v) { return v ? sig9(*v) : std::string(); };
    for (const SweepCell& c : result.cells) {
        out << c.decoder << ',' << sig9(c.snr) << ',' << c.N << ',' << c.trials << ','
            << field(c.mean_visited) << ',' << field(c.std_visited) << ','
            << field(c.ml_match_rate) << ',' << field(c.sub_symbol_err) << ','
            << field(c.opt_m_rate) << ',' << field(c.sll_accept_rate) << ',' << result.seed
            << '\n';
    }
}

void write_csv_file(const SweepResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open CSV output path: " + path);
    write_csv(result, out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing CSV to: " + path);
}

}  // namespace trellisml
