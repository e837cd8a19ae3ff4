#pragma once

#include <cstdint>
#include <optional>

#include "trellisml/metrics.hpp"

namespace trellisml {

struct ComplexityStats {
    uint64_t visited_states = 0;
    int time_span = 0;
    double normalized = 0;  // visited_states / N
};

struct DecodeResult {
    Message message;
    double metric = 0;  // negative_sll(rx, encode(message))
    ComplexityStats stats;
    bool certified_ml = false;
};

// Exact ML via the Viterbi algorithm (path covering only). Counts every
// Markov state holding a live survivor.
DecodeResult viterbi_decode(const ReceivedSequence& rx, const Trellis& trellis,
                            const SymbolMapper& mapper);

// Exhaustive minimizer over all q^{kN} messages; lexicographically smallest
// message wins exact metric ties. The reference oracle for everything else.
DecodeResult brute_force_ml(const ReceivedSequence& rx, const GeneratorMatrix& code,
                            const SymbolMapper& mapper, int N,
                            uint64_t budget = 1ull << 20);

// Sphere-decoder style branch bound: the accumulated metric of a message
// prefix x[0..m] lower-bounds the negative SLL of every completion.
// An empty prefix gives 0.
double sphere_branch_lower_bound(const ReceivedSequence& rx, const Message& prefix,
                                 const GeneratorMatrix& code, const SymbolMapper& mapper);

// Viterbi with branch-bound pruning against negative_sll(rx, encode(guess)):
// a state whose best incoming prefix metric strictly exceeds the guess metric
// cannot lie on the ML path and is not expanded. Output is still exact ML.
DecodeResult sll_augmented_viterbi(const ReceivedSequence& rx, const Trellis& trellis,
                                   const SymbolMapper& mapper, const Message& guess);

// Minimum signal-space weight of a nonzero codeword difference: shortest
// path over the difference trellis with per-symbol weights
// min_a ||g(a+e) - g(a)||^2. Stable in N once N >= 2 nu.
double codeword_distance_bound(const GeneratorMatrix& code, int N,
                               const SymbolMapper& mapper);

// Whole-codeword test against the distance bound: certifies the guess is ML
// when even the closest other codeword cannot beat it. Sound via the block
// triangle inequality; false is inconclusive.
bool whole_codeword_optimality_test(const ReceivedSequence& rx, const Message& guess,
                                    double distance_bound, const GeneratorMatrix& code,
                                    const SymbolMapper& mapper);

struct SuboptimalStrategy {
    enum class Kind { decision_feedback, list };
    Kind kind = Kind::decision_feedback;
    int list_size = 1;  // L for Kind::list

    static SuboptimalStrategy decision_feedback() { return {Kind::decision_feedback, 1}; }
    static SuboptimalStrategy list(int L) { return {Kind::list, L}; }
};

// First-pass decoder with no optimality guarantee. decision_feedback needs
// G[0] of full row rank; list(L) is a per-state-deduplicated beam, exact
// when L covers the state count. visited_out, when given, receives the
// number of states the pass examined.
Message suboptimal_decode(const ReceivedSequence& rx, const Trellis& trellis,
                          const SymbolMapper& mapper, const SuboptimalStrategy& strategy,
                          uint64_t* visited_out = nullptr);

// Window parameters for the neighboring-log-likelihood test:
// 0 < xi < d_min^2/2 and M > nu d_max^2 / (3 xi).
struct NllParams {
    double xi = 1;
    int M = 1;
    double d_min2 = 4;
    double d_max2 = 8;
    int nu = 1;

    static NllParams validated(double xi, int M, double d_min2, double d_max2, int nu);
    // xi = d_min^2/4 and the smallest admissible M.
    static NllParams defaults_for(const SymbolMapper& mapper, int n, int nu);
    // Smallest M with M*xi > nu*d_max^2 so the flank conditions have a
    // nonnegative budget and the test can actually fire.
    static NllParams feasible_for(double xi, const SymbolMapper& mapper, int n, int nu);

    // Right-hand side of the flank inequalities; negative means the flank
    // conditions are unsatisfiable and the test never confirms at interior m.
    double flank_budget() const { return M * xi - nu * d_max2; }
    int inner_halfwidth() const { return 2 * M * nu; }
    int window_halfwidth() const { return (2 * M + 1) * nu; }
};

// The inner condition compares ||r - g(y)|| against d_min^2/2 - xi as
// written in the source inequality; `squared` compares the squared norm
// instead (see README on the dimensional ambiguity).
enum class NllConditionA { literal, squared };

// What to do when the test window leaves the observed index range.
//   clip          - return unconfirmed (never fires near either end).
//   zero_anchored - drop the flank condition on a side where every competing
//                   path is already forced to merge through the zero boundary
//                   state, and restrict the inner condition to observed
//                   indices. Flanks that remain required must lie fully in
//                   range. Preserves soundness; confirms near boundaries too.
enum class NllBoundary { clip, zero_anchored };

struct NllOptions {
    NllConditionA condition_a = NllConditionA::literal;
    NllBoundary boundary = NllBoundary::clip;
};

// True certifies that the candidate's source symbols on [m, m+nu) equal the
// ML message's. Checks the inner closeness condition on
// [m-2Mnu, m+2Mnu) and both flank sums against M*xi - nu*d_max^2.
bool nll_confirm(const ReceivedSequence& rx, const Codeword& candidate, int m,
                 const NllParams& params, const SymbolMapper& mapper,
                 const NllOptions& options = {});

// Per-index admissible source symbol sets: singleton where some window
// confirmed the guess, the full alphabet elsewhere.
struct SymbolSetSequence {
    uint32_t alphabet_size = 2;       // q^k
    std::vector<uint8_t> singleton;   // flag per d in [0, N)
    std::vector<uint32_t> confirmed;  // input index per d, valid when singleton

    int length() const { return static_cast<int>(singleton.size()); }
    bool is_singleton(int d) const { return singleton[d] != 0; }
    uint64_t set_size(int d) const { return singleton[d] ? 1 : alphabet_size; }
};

// Sweeps the confirmation window over all m sharing residual prefix sums,
// so the whole pass is linear in N.
SymbolSetSequence build_symbol_sets(const ReceivedSequence& rx, const Message& guess,
                                    const NllParams& params, const Trellis& trellis,
                                    const SymbolMapper& mapper,
                                    const NllOptions& options = {});

// Viterbi restricted to states whose window symbols all belong to the
// admissible sets. Exact ML whenever the sets are sound.
DecodeResult modified_viterbi(const ReceivedSequence& rx, const Trellis& trellis,
                              const SymbolMapper& mapper, const SymbolSetSequence& sets);

struct ThreeStepResult {
    DecodeResult result;           // modified-Viterbi output, stats = step 3
    uint64_t step1_visited = 0;    // suboptimal pass
    uint64_t step2_ops = 0;        // window-sweep work, one unit per index
    double singleton_fraction = 0; // confirmed share of source symbols
};

// Suboptimal guess -> per-symbol confirmation -> restricted Viterbi.
ThreeStepResult three_step_decode(const ReceivedSequence& rx, const Trellis& trellis,
                                  const SymbolMapper& mapper, const NllParams& params,
                                  const SuboptimalStrategy& strategy,
                                  const NllOptions& options = {});

}  // namespace trellisml
