#pragma once

#include <functional>
#include <span>

#include "trellisml/decoders.hpp"

namespace trellisml {

// First-order hidden Markov system with a deterministic state-processing
// map observed through a known density. State 0 is the boundary state:
// valid sequences are implicitly 0 before index 0 and from the sequence end
// onwards. All probabilities live in the log domain; forbidden transitions
// are -inf.
struct HmmSystem {
    int num_states = 0;
    int obs_dim = 1;
    int nu = 1;  // shared homogeneity/observability order

    // trans_logp[prev * num_states + next] = log P_t(next | prev)
    std::vector<double> trans_logp;

    // processed state index per Markov state; only used to decide when two
    // states look identical to the observer
    std::vector<int> process;

    std::function<double(std::span<const double>, int)> obs_logdensity;  // (r_d, state)
    std::function<double(std::span<const double>, int)> bound_l;         // L_l(r, state)
    std::function<double(std::span<const double>, int)> bound_u;         // L_u(r, state)

    double logp(int prev, int next) const {
        return trans_logp[static_cast<size_t>(prev) * num_states + next];
    }

    // Rows must sum to one (within 1e-9) and the zero state must be able to
    // hold itself, otherwise no boundary-padded sequence is valid.
    void validate() const;
};

struct StateSequence {
    std::vector<int> states;  // u[0 .. N-1], implicit zeros outside

    int length() const { return static_cast<int>(states.size()); }
    friend bool operator==(const StateSequence& a, const StateSequence& b) {
        return a.states == b.states;
    }
};

// p_tr: smallest ratio between any two positive transition probabilities.
double transition_ratio_bound(const HmmSystem& sys);

// Smallest nu with a strictly positive nu-step transition matrix; chains
// that never mix within `cap` steps are rejected.
int homogeneity_order(const HmmSystem& sys, int cap = 64);

// True iff state disagreement at any index forces a processed-state
// disagreement within nu-1 steps on either side. Checked on the product
// automaton restricted to pairs with equal processed outputs.
bool verify_observability(const HmmSystem& sys, int nu, uint64_t budget = 1ull << 22);

// -sum_d [log f_o(r[d]|y[d]) + log P_t(u[d]|u[d-1])] over d in [0, N), plus
// the closing transition back to the zero state. Invalid transitions are a
// contract error.
double hmm_negative_sll(const HmmSystem& sys, const ReceivedSequence& rx,
                        const StateSequence& seq);

struct HmmDecodeResult {
    StateSequence sequence;
    double metric = 0;
    ComplexityStats stats;
};

// Exact MLSD by dynamic programming over cover paths; lexicographically
// smallest state sequence on exact ties.
HmmDecodeResult hmm_viterbi(const HmmSystem& sys, const ReceivedSequence& rx);

// Exhaustive oracle over all valid state sequences.
StateSequence hmm_brute_force(const HmmSystem& sys, const ReceivedSequence& rx,
                              uint64_t budget = 1ull << 22);

// Neighboring-log-likelihood test: true certifies candidate[m+nu-1] equals
// the ML sequence's state there. Checks L_l(r[d], y[d]) > 3 nu (rho - log p_tr)
// on the inner window and the two L_u flank sums against
// 3 M nu rho + (nu+1) log p_tr (right) / 3 M nu rho + nu log p_tr (left).
bool hmm_nll_confirm(const HmmSystem& sys, const ReceivedSequence& rx,
                     const StateSequence& candidate, int m, double rho, int M,
                     NllBoundary boundary = NllBoundary::clip);

// rho schedule that turns the generic test into the convolutional-code one.
inline double rho_schedule(double xi, double snr, int nu) { return xi * snr / (3 * nu); }

// The memoryless-Gaussian convolutional system: states are the q^{k nu}
// source windows, transitions are uniform over the q^k inputs, and the
// bounds follow the triangle inequality around the mapped outputs.
HmmSystem gaussian_conv_system(const GeneratorMatrix& code, const SymbolMapper& mapper,
                               double snr);

}  // namespace trellisml
