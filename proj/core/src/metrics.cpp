#include "trellisml/metrics.hpp"

#include <string>

namespace trellisml {

double branch_metric(std::span<const double> r_d, std::span<const Sym> y_d,
                     const SymbolMapper& mapper) {
    if (r_d.size() != y_d.size()) {
        throw contract_error("branch_metric: dimension mismatch");
    }
    double acc = 0;
    for (size_t i = 0; i < r_d.size(); ++i) {
        const double e = r_d[i] - mapper(y_d[i]);
        acc += e * e;
    }
    return acc;
}

double negative_sll(const ReceivedSequence& rx, const Codeword& cw,
                    const SymbolMapper& mapper) {
    if (rx.n != cw.n || rx.length() != cw.length()) {
        throw contract_error("negative_sll: shape mismatch (rx " +
                             std::to_string(rx.length()) + "x" + std::to_string(rx.n) +
                             ", cw " + std::to_string(cw.length()) + "x" +
                             std::to_string(cw.n) + ")");
    }
    long double acc = 0;
    const int len = cw.length();
    for (int d = 0; d < len; ++d) {
        acc += branch_metric(rx.at(d), {cw.at(d), static_cast<size_t>(cw.n)}, mapper);
    }
    return static_cast<double>(acc);
}

bool covers(const PathView& path_a, const PathView& path_b, int d1, int d2) {
    if (path_a.states.size() != path_b.states.size() ||
        path_a.loglik.size() != path_a.states.size() ||
        path_b.loglik.size() != path_b.states.size()) {
        throw contract_error("covers: path shapes differ");
    }
    const int len = static_cast<int>(path_a.states.size());
    if (d1 >= d2 || d1 < -1 || d2 >= len) {
        throw contract_error("covers: need -1 <= d1 < d2 < path length");
    }
    if (d1 >= 0 && path_a.states[d1] != path_b.states[d1]) {
        throw contract_error("covers: paths do not share a state at d1");
    }
    if (path_a.states[d2] != path_b.states[d2]) {
        throw contract_error("covers: paths do not share a state at d2");
    }
    long double gap = 0;  // sum of (loglik_a - loglik_b) over (d1, d2]
    for (int d = d1 + 1; d <= d2; ++d) {
        gap += static_cast<long double>(path_a.loglik[d]) - path_b.loglik[d];
    }
    return gap > 0;
}

}  // namespace trellisml
