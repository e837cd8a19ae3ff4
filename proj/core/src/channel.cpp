#include "trellisml/channel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace trellisml {

SymbolMapper::SymbolMapper(std::vector<double> table) : table_(std::move(table)) {
    if (table_.empty()) throw config_error("symbol map is empty");
    for (size_t i = 0; i < table_.size(); ++i) {
        for (size_t j = i + 1; j < table_.size(); ++j) {
            if (table_[i] == table_[j]) {
                throw config_error("symbol map is not injective: map[" + std::to_string(i) +
                                   "] == map[" + std::to_string(j) + "]");
            }
        }
    }
}

SymbolMapper SymbolMapper::pam(uint32_t q) {
    std::vector<double> t(q);
    for (uint32_t v = 0; v < q; ++v) t[v] = static_cast<double>(q - 1) - 2.0 * v;
    return SymbolMapper(std::move(t));
}

ReceivedSequence modulate(const Codeword& cw, const SymbolMapper& mapper) {
    ReceivedSequence out;
    out.n = cw.n;
    out.samples.resize(cw.sym.size());
    for (size_t i = 0; i < cw.sym.size(); ++i) out.samples[i] = mapper(cw.sym[i]);
    return out;
}

ReceivedSequence transmit(const ReceivedSequence& modulated, const NoiseModel& noise,
                          const TrialRng& rng) {
    if (noise.sigma2 < 0) throw config_error("sigma2 must be >= 0");
    ReceivedSequence out = modulated;
    if (noise.sigma2 == 0) return out;
    const double sigma = std::sqrt(noise.sigma2);
    const int n = out.n;
    const int len = out.length();
    for (int d = 0; d < len; ++d) {
        for (int i = 0; i < n; ++i) {
            out.samples[static_cast<size_t>(d) * n + i] += sigma * rng.gaussian(d, i);
        }
    }
    return out;
}

SignalDistances signal_distances(const SymbolMapper& mapper, int n) {
    if (n < 1) throw contract_error("signal_distances: n must be >= 1");
    const uint32_t q = mapper.q();
    if (q < 2) throw contract_error("signal_distances: alphabet has no distinct pairs");
    double per_min = std::numeric_limits<double>::infinity();
    double per_max = 0;
    for (uint32_t a = 0; a < q; ++a) {
        for (uint32_t b = a + 1; b < q; ++b) {
            const double g = mapper(static_cast<Sym>(a)) - mapper(static_cast<Sym>(b));
            const double d2 = g * g;
            if (d2 < per_min) per_min = d2;
            if (d2 > per_max) per_max = d2;
        }
    }
    return {per_min, per_max * n};
}

}  // namespace trellisml
