#pragma once

#include "trellisml/experiments.hpp"

namespace tml_test {

using namespace trellisml;

inline GeneratorMatrix code75() { return GeneratorMatrix::from_octal(2, {7, 5}); }

// q = 3, k = 1, n = 2, nu = 2: G[0] = [1 1], G[1] = [1 2].
inline GeneratorMatrix code_q3() {
    return GeneratorMatrix(PrimeField(3), 1, 2, 2, {1, 1, 1, 2});
}

inline Message bits(std::initializer_list<int> v) {
    Message m;
    m.k = 1;
    for (int b : v) m.sym.push_back(static_cast<Sym>(b));
    return m;
}

inline ReceivedSequence noisy_rx(const GeneratorMatrix& code, const SymbolMapper& mapper,
                                 const Message& msg, double sigma2, uint64_t seed,
                                 uint64_t trial) {
    return transmit(modulate(encode(msg, code), mapper), NoiseModel{sigma2},
                    TrialRng{seed, trial});
}

inline Message random_message(const Trellis& tr, uint64_t seed, uint64_t trial) {
    TrialRng rng{seed, trial};
    Message msg;
    msg.k = tr.code().k();
    msg.sym.assign(static_cast<size_t>(tr.N()) * msg.k, 0);
    for (int d = 0; d < tr.N(); ++d) {
        const uint32_t a =
            static_cast<uint32_t>(rng.uniform_below(tr.num_inputs(), d, 0x6d736773ULL));
        tr.input_symbols(a, &msg.at(d, 0));
    }
    return msg;
}

}  // namespace tml_test
