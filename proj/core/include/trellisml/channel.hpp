#pragma once

#include <span>
#include <vector>

#include "trellisml/convcode.hpp"
#include "trellisml/rng.hpp"

namespace trellisml {

// Injective map g_q from GF(q) into the reals, applied coordinatewise.
class SymbolMapper {
public:
    explicit SymbolMapper(std::vector<double> table);

    // Symmetric PAM: g(v) = (q-1) - 2v. BPSK for q = 2.
    static SymbolMapper pam(uint32_t q);

    uint32_t q() const { return static_cast<uint32_t>(table_.size()); }
    double operator()(Sym v) const { return table_[v]; }

private:
    std::vector<double> table_;
};

struct NoiseModel {
    double sigma2 = 1.0;  // sigma2 == 0 allowed for noiseless tests

    double snr() const { return 1.0 / sigma2; }
    static NoiseModel from_snr(double snr) { return {1.0 / snr}; }
};

// Real-valued observations r[d], one n-dim sample per codeword symbol.
struct ReceivedSequence {
    int n = 1;
    std::vector<double> samples;

    int length() const { return static_cast<int>(samples.size()) / n; }
    std::span<const double> at(int d) const {
        return {samples.data() + static_cast<size_t>(d) * n, static_cast<size_t>(n)};
    }
};

// g_q applied elementwise; output shape matches the codeword.
ReceivedSequence modulate(const Codeword& cw, const SymbolMapper& mapper);

// r[d] = modulated[d] + n[d] with n[d] i.i.d. N(0, sigma2 I). Deterministic
// given the rng's (seed, trial): sample (d, i) never depends on call order.
ReceivedSequence transmit(const ReceivedSequence& modulated, const NoiseModel& noise,
                          const TrialRng& rng);

struct SignalDistances {
    double d_min2 = 0;
    double d_max2 = 0;
};

// Extreme squared distances between distinct mapped n-dim symbols. The symbol
// alphabet is the full product GF(q)^n, so the extremes decompose per
// coordinate: the min is one coordinate at the smallest nonzero gap, the max
// is every coordinate at the largest gap.
SignalDistances signal_distances(const SymbolMapper& mapper, int n);

}  // namespace trellisml
