#pragma once

#include <span>

#include "trellisml/channel.hpp"

namespace trellisml {

// ||r[d] - g(y[d])||^2 for a single time index.
double branch_metric(std::span<const double> r_d, std::span<const Sym> y_d,
                     const SymbolMapper& mapper);

// Negative sum log likelihood of a codeword against the received sequence:
// sum over d in [0, N+nu-1) of ||r[d] - g(y[d])||^2 (Gaussian channel, up to
// the positive SNR/2 scale that argmin ignores). Accumulated in extended
// precision so cover decisions near zero are not rounding artifacts.
double negative_sll(const ReceivedSequence& rx, const Codeword& cw,
                    const SymbolMapper& mapper);

// A Markov path over (d1, d2] described by its states and per-index
// accumulated log-likelihood terms log f_o(r[d]|y[d]) + log P_t(u[d]|u[d-1]).
struct PathView {
    std::span<const int> states;
    std::span<const double> loglik;
};

// Path covering: true iff path_a's log-likelihood sum over (d1, d2] strictly
// exceeds path_b's, certifying path_b is not the ML path. Requires shared
// endpoint states; d1 == -1 stands for the common zero origin. Ties do not
// eliminate.
bool covers(const PathView& path_a, const PathView& path_b, int d1, int d2);

}  // namespace trellisml
