#pragma once

#include <cstdint>
#include <vector>

#include "trellisml/galois.hpp"

namespace trellisml {

using Sym = uint16_t;  // one GF(q) value, q < 2^16

// Source message: N symbols, each a k-dim row vector over GF(q), stored
// row-major. Indices outside [0, N) are implicitly zero.
struct Message {
    int k = 1;
    std::vector<Sym> sym;

    int length() const { return static_cast<int>(sym.size()) / k; }
    Sym at(int d, int i) const { return sym[static_cast<size_t>(d) * k + i]; }
    Sym& at(int d, int i) { return sym[static_cast<size_t>(d) * k + i]; }

    friend bool operator==(const Message& a, const Message& b) {
        return a.k == b.k && a.sym == b.sym;
    }
};

// Codeword: N+nu-1 symbols, each an n-dim row vector over GF(q).
struct Codeword {
    int n = 1;
    std::vector<Sym> sym;

    int length() const { return static_cast<int>(sym.size()) / n; }
    const Sym* at(int d) const { return sym.data() + static_cast<size_t>(d) * n; }

    friend bool operator==(const Codeword& a, const Codeword& b) {
        return a.n == b.n && a.sym == b.sym;
    }
};

// Markov state at time d: the window [x[d-nu+1], ..., x[d]] flattened to a
// k*nu vector, oldest symbol first. Matches the q^{k*nu} state indexing the
// optimality tests are stated in.
using MarkovState = std::vector<Sym>;

// The polynomial encoder G(D) = G[0] + G[1] D + ... + G[nu-1] D^{nu-1},
// with k x n tap matrices over GF(q). Construction rejects generators whose
// first tap is all-zero or whose state->output map is not observable within
// a nu-wide window (see observable() below).
class GeneratorMatrix {
public:
    GeneratorMatrix(PrimeField field, int k, int n, int nu,
                    std::vector<Sym> taps_row_major);

    // Binary codes from the usual per-output-stream octal notation,
    // MSB = G[0]. E.g. {7, 5} is the nu=3, rate-1/2 textbook code.
    static GeneratorMatrix from_octal(uint32_t q, const std::vector<uint32_t>& octal);

    const PrimeField& field() const { return field_; }
    uint32_t q() const { return field_.q(); }
    int k() const { return k_; }
    int n() const { return n_; }
    int nu() const { return nu_; }

    Sym tap(int l, int i, int j) const {
        return taps_[(static_cast<size_t>(l) * k_ + i) * n_ + j];
    }

    uint64_t input_count() const;  // q^k
    uint64_t state_count() const;  // q^{k*nu}

    // True iff every difference pattern with a nonzero symbol at index m
    // produces a nonzero codeword symbol somewhere in [m, m+nu). Violations
    // (e.g. the catastrophic 1+D encoder) defeat the windowed optimality
    // tests, so construction rejects them.
    static bool observable(const PrimeField& field, int k, int n, int nu,
                           const std::vector<Sym>& taps);

private:
    PrimeField field_;
    int k_, n_, nu_;
    std::vector<Sym> taps_;
};

// y[d] = sum_l x[d-l] G[l] for d in [0, N+nu-1), out-of-range x treated as 0.
Codeword encode(const Message& msg, const GeneratorMatrix& code);

// u[d] = [x[d-nu+1], ..., x[d]] for d in [0, N+nu-1), oldest first.
std::vector<MarkovState> state_sequence(const Message& msg, const GeneratorMatrix& code);

// Materialized Markov graph over integer state ids. A state id packs the
// window symbols base q^k with the newest symbol in the least significant
// digit, so id 0 is always the all-zero boundary state.
class Trellis {
public:
    Trellis(const GeneratorMatrix& code, int N, uint64_t state_budget = 1ull << 20);

    const GeneratorMatrix& code() const { return code_; }
    int N() const { return N_; }
    int span() const { return N_ + code_.nu() - 1; }
    uint32_t num_states() const { return num_states_; }
    uint32_t num_inputs() const { return num_inputs_; }  // q^k

    // Successor of state s on input symbol a (a indexes GF(q)^k).
    uint32_t next_state(uint32_t s, uint32_t a) const {
        return (s % older_mod_) * num_inputs_ + a;
    }
    // Input symbol consumed to enter state s.
    uint32_t newest_input(uint32_t s) const { return s % num_inputs_; }

    // Inputs at time t are free for t < N and forced to zero afterwards.
    uint32_t input_choices(int t) const { return t < N_ ? num_inputs_ : 1; }

    // A state is realizable at time t iff window symbols outside [0, N)
    // are zero.
    bool state_valid(int t, uint32_t s) const;

    // Codeword symbol emitted by state s (n GF(q) values).
    const Sym* output(uint32_t s) const {
        return outputs_.data() + static_cast<size_t>(s) * code_.n();
    }

    // Symbol of the window at lag j (j=0 newest), as an input index.
    uint32_t window_digit(uint32_t s, int j) const;

    // Decode an input index into k GF(q) values.
    void input_symbols(uint32_t a, Sym* out) const;

private:
    GeneratorMatrix code_;
    int N_;
    uint32_t num_states_;
    uint32_t num_inputs_;
    uint32_t older_mod_;         // q^{k(nu-1)}
    std::vector<Sym> outputs_;   // per-state n-dim output
};

}  // namespace trellisml
