#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "trellisml/hmm.hpp"

namespace trellisml {

struct CodeSpec {
    uint32_t q = 2;
    int k = 1;
    int n = 2;
    int nu = 3;
    std::vector<uint32_t> octal{7, 5};  // binary codes; empty means use taps
    std::vector<Sym> taps;              // row-major nu*k*n for general q

    GeneratorMatrix build() const;
};

struct TrialConfig {
    CodeSpec code;
    std::vector<int> lengths{8};
    std::vector<double> snrs{1.0};
    int trials = 100;
    uint64_t seed = 1;
    std::vector<std::string> decoders{"viterbi", "three_step"};

    std::optional<double> xi;  // NllParams overrides; defaults derive from the map
    std::optional<int> M;
    NllOptions nll;

    enum class GuessMode { ideal, suboptimal };
    GuessMode guess = GuessMode::suboptimal;
    SuboptimalStrategy strategy = SuboptimalStrategy::decision_feedback();

    std::optional<std::vector<double>> map;  // custom g_q table, else symmetric PAM
    int threads = 1;
    uint64_t oracle_budget = 1ull << 16;  // brute-force gating threshold on q^{kN}

    SymbolMapper build_mapper() const;
    NllParams build_nll_params() const;
};

struct DecoderRun {
    std::string name;
    double metric = 0;
    double normalized_visited = 0;
    uint64_t visited = 0;
    bool matches_transmitted = false;
    bool certified_ml = false;
};

struct TrialRecord {
    uint64_t trial = 0;
    int N = 0;
    double snr = 0;
    Message transmitted;
    double transmitted_metric = 0;  // negative SLL of the true codeword
    std::vector<DecoderRun> runs;
    std::optional<double> oracle_metric;  // brute force, when q^{kN} fits the budget
};

// One seeded end-to-end trial: draw a message, transmit, run the selected
// decoders ("viterbi", "sll_viterbi", "three_step", "brute_force").
// Deterministic in (cfg.seed, N, trial_index); the noise realization does not
// depend on snr, so snr sweeps run on matched noise.
TrialRecord run_trial(const TrialConfig& cfg, int N, double snr, uint64_t trial_index);

struct SweepCell {
    std::string decoder;
    double snr = 0;
    int N = 0;
    int trials = 0;
    std::optional<double> mean_visited;
    std::optional<double> std_visited;
    std::optional<double> ml_match_rate;
    std::optional<double> sub_symbol_err;
    std::optional<double> opt_m_rate;
    std::optional<double> sll_accept_rate;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    uint64_t seed = 0;
    // named per-cell extras (medians, band fractions, metric gaps) for the
    // acceptance harness; not part of the CSV schema
    std::map<std::string, double> diagnostics;
};

// Ideal-guess study of the sphere-style bound: acceptance rate of
// S_x^L > S_x for a single perturbed source symbol, plus the visited-state
// ratio of the bound-pruned Viterbi against the plain one.
SweepResult sll_inefficiency_sweep(const TrialConfig& cfg);

// Empirical probability that the window test confirms the transmitted
// codeword at an interior index.
SweepResult opt_probability_sweep(const TrialConfig& cfg);

// Visited-state distribution of the three-step decoder (with a plain
// Viterbi reference) and the symbol error rate of the first pass.
SweepResult complexity_sweep(const TrialConfig& cfg);

// Fixed schema, 9-significant-digit decimals, rows sorted by
// (decoder, snr, N); absent measurements are empty fields.
void write_csv(const SweepResult& result, std::ostream& out);
void write_csv_file(const SweepResult& result, const std::string& path);

}  // namespace trellisml
