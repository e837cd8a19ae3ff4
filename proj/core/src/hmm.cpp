#include "trellisml/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

namespace trellisml {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr long double kDead = std::numeric_limits<long double>::infinity();
}  // namespace

void HmmSystem::validate() const {
    if (num_states < 1) throw config_error("hmm: num_states must be >= 1");
    if (trans_logp.size() != static_cast<size_t>(num_states) * num_states) {
        throw config_error("hmm: transition table must be num_states^2 entries");
    }
    if (process.size() != static_cast<size_t>(num_states)) {
        throw config_error("hmm: process map must cover every state");
    }
    if (!obs_logdensity) throw config_error("hmm: observation log-density is unset");
    for (int p = 0; p < num_states; ++p) {
        double row = 0;
        for (int s = 0; s < num_states; ++s) {
            const double lp = logp(p, s);
            if (lp > kNegInf) row += std::exp(lp);
        }
        if (std::abs(row - 1.0) > 1e-9) {
            throw config_error("hmm: transition row " + std::to_string(p) +
                               " sums to " + std::to_string(row));
        }
    }
    if (!(logp(0, 0) > kNegInf)) {
        throw config_error("hmm: the zero state must be self-reachable for boundary padding");
    }
}

double transition_ratio_bound(const HmmSystem& sys) {
    double pmin = std::numeric_limits<double>::infinity();
    double pmax = 0;
    for (double lp : sys.trans_logp) {
        if (lp <= kNegInf) continue;
        const double p = std::exp(lp);
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
    }
    if (pmax == 0) throw contract_error("p_tr: no positive transition exists");
    return pmin / pmax;
}

int homogeneity_order(const HmmSystem& sys, int cap) {
    const int S = sys.num_states;
    std::vector<char> reach(static_cast<size_t>(S) * S), step(reach.size()), next(reach.size());
    for (int p = 0; p < S; ++p)
        for (int s = 0; s < S; ++s)
            step[static_cast<size_t>(p) * S + s] = sys.logp(p, s) > kNegInf ? 1 : 0;
    reach = step;
    for (int nu = 1; nu <= cap; ++nu) {
        bool all = true;
        for (char c : reach)
            if (!c) {
                all = false;
                break;
            }
        if (all) return nu;
        std::fill(next.begin(), next.end(), 0);
        for (int p = 0; p < S; ++p) {
            for (int mdl = 0; mdl < S; ++mdl) {
                if (!reach[static_cast<size_t>(p) * S + mdl]) continue;
                for (int s = 0; s < S; ++s) {
                    if (step[static_cast<size_t>(mdl) * S + s])
                        next[static_cast<size_t>(p) * S + s] = 1;
                }
            }
        }
        reach.swap(next);
    }
    throw config_error("hmm: no nu <= " + std::to_string(cap) +
                       " makes every nu-step transition positive (chain rejected)");
}

bool verify_observability(const HmmSystem& sys, int nu, uint64_t budget) {
    const int S = sys.num_states;
    if (static_cast<uint64_t>(S) * S > budget) {
        throw resource_error("observability: state pair count exceeds budget");
    }
    // Pairs with identical processed outputs; a violation is a walk of
    // 2 nu - 1 such pairs whose middle pair is unequal. Pair reachability
    // from the boundary is free once the chain mixes, so only the local walk
    // structure matters.
    const size_t P = static_cast<size_t>(S) * S;
    std::vector<char> eq(P, 0);
    for (int a = 0; a < S; ++a)
        for (int b = 0; b < S; ++b)
            eq[static_cast<size_t>(a) * S + b] = sys.process[a] == sys.process[b] ? 1 : 0;

    auto advance = [&](const std::vector<char>& from, bool forward) {
        std::vector<char> to(P, 0);
        for (int a = 0; a < S; ++a) {
            for (int b = 0; b < S; ++b) {
                if (!from[static_cast<size_t>(a) * S + b]) continue;
                for (int a2 = 0; a2 < S; ++a2) {
                    const double lpa = forward ? sys.logp(a, a2) : sys.logp(a2, a);
                    if (lpa <= kNegInf) continue;
                    for (int b2 = 0; b2 < S; ++b2) {
                        const double lpb = forward ? sys.logp(b, b2) : sys.logp(b2, b);
                        if (lpb <= kNegInf) continue;
                        const size_t id = static_cast<size_t>(a2) * S + b2;
                        if (eq[id]) to[id] = 1;
                    }
                }
            }
        }
        return to;
    };

    std::vector<char> fwd = eq, bwd = eq;
    for (int i = 0; i < nu - 1; ++i) fwd = advance(fwd, true);
    for (int i = 0; i < nu - 1; ++i) bwd = advance(bwd, false);
    for (int a = 0; a < S; ++a) {
        for (int b = 0; b < S; ++b) {
            if (a == b) continue;
            const size_t id = static_cast<size_t>(a) * S + b;
            if (fwd[id] && bwd[id]) return false;
        }
    }
    return true;
}

double hmm_negative_sll(const HmmSystem& sys, const ReceivedSequence& rx,
                        const StateSequence& seq) {
    if (rx.n != sys.obs_dim || seq.length() != rx.length()) {
        throw contract_error("hmm_negative_sll: sequence/observation shape mismatch");
    }
    const int N = seq.length();
    long double acc = 0;
    int prev = 0;
    for (int d = 0; d < N; ++d) {
        const int s = seq.states[d];
        if (s < 0 || s >= sys.num_states) throw contract_error("hmm: state id out of range");
        const double lt = sys.logp(prev, s);
        if (lt <= kNegInf) {
            throw contract_error("hmm_negative_sll: forbidden transition at index " +
                                 std::to_string(d));
        }
        acc -= lt;
        acc -= sys.obs_logdensity(rx.at(d), s);
        prev = s;
    }
    const double closing = sys.logp(prev, 0);
    if (closing <= kNegInf) {
        throw contract_error("hmm_negative_sll: final state cannot close into the boundary");
    }
    acc -= closing;
    return static_cast<double>(acc);
}

namespace {

std::vector<int> hmm_history(const std::vector<int>& bp, int S, int t, int s) {
    std::vector<int> h(static_cast<size_t>(t) + 1);
    for (int i = t; i >= 0; --i) {
        h[i] = s;
        s = bp[static_cast<size_t>(i) * S + s];
    }
    return h;
}

}  // namespace

HmmDecodeResult hmm_viterbi(const HmmSystem& sys, const ReceivedSequence& rx) {
    sys.validate();
    if (rx.n != sys.obs_dim) throw contract_error("hmm_viterbi: observation dimension mismatch");
    const int N = rx.length();
    const int S = sys.num_states;
    if (static_cast<uint64_t>(N) * S > (1ull << 26)) {
        throw resource_error("hmm_viterbi: DP table too large");
    }
    std::vector<long double> prev(S, kDead), cur(S, kDead);
    std::vector<int> bp(static_cast<size_t>(N) * S, 0);
    uint64_t visited = 0;

    auto lex_less = [&](int t, int sa, int sb) {
        const auto ha = hmm_history(bp, S, t, sa);
        const auto hb = hmm_history(bp, S, t, sb);
        return std::lexicographical_compare(ha.begin(), ha.end(), hb.begin(), hb.end());
    };

    for (int t = 0; t < N; ++t) {
        std::fill(cur.begin(), cur.end(), kDead);
        for (int s = 0; s < S; ++s) {
            const double obs = sys.obs_logdensity(rx.at(t), s);
            if (t == 0) {
                const double lt = sys.logp(0, s);
                if (lt <= kNegInf) continue;
                cur[s] = -static_cast<long double>(lt) - obs;
                bp[s] = 0;
                continue;
            }
            for (int p = 0; p < S; ++p) {
                if (prev[p] == kDead) continue;
                const double lt = sys.logp(p, s);
                if (lt <= kNegInf) continue;
                const long double cand = prev[p] - static_cast<long double>(lt) - obs;
                const size_t slot = static_cast<size_t>(t) * S + s;
                if (cand < cur[s]) {
                    cur[s] = cand;
                    bp[slot] = p;
                } else if (cand == cur[s] && lex_less(t - 1, p, bp[slot])) {
                    bp[slot] = p;
                }
            }
        }
        for (int s = 0; s < S; ++s)
            if (cur[s] != kDead) ++visited;
        std::swap(prev, cur);
    }

    int best = -1;
    long double best_metric = kDead;
    for (int s = 0; s < S; ++s) {
        if (prev[s] == kDead) continue;
        const double closing = sys.logp(s, 0);
        if (closing <= kNegInf) continue;
        const long double total = prev[s] - static_cast<long double>(closing);
        if (total < best_metric || (total == best_metric && lex_less(N - 1, s, best))) {
            best_metric = total;
            best = s;
        }
    }
    if (best < 0) throw contract_error("hmm_viterbi: no valid sequence reaches the boundary");

    HmmDecodeResult out;
    out.sequence.states = hmm_history(bp, S, N - 1, best);
    out.metric = hmm_negative_sll(sys, rx, out.sequence);
    out.stats.visited_states = visited;
    out.stats.time_span = N;
    out.stats.normalized = static_cast<double>(visited) / N;
    return out;
}

StateSequence hmm_brute_force(const HmmSystem& sys, const ReceivedSequence& rx,
                              uint64_t budget) {
    sys.validate();
    const int N = rx.length();
    const int S = sys.num_states;
    uint64_t total = 1;
    for (int i = 0; i < N; ++i) {
        if (total > budget / S) throw resource_error("hmm_brute_force: S^N exceeds budget");
        total *= S;
    }
    std::vector<int> digits(N, 0);
    StateSequence best;
    long double best_metric = kDead;
    for (uint64_t idx = 0;; ++idx) {
        // validity + metric in one pass
        long double acc = 0;
        bool valid = true;
        int prev = 0;
        for (int d = 0; d < N && valid; ++d) {
            const int s = digits[d];
            const double lt = sys.logp(prev, s);
            if (lt <= kNegInf) {
                valid = false;
                break;
            }
            acc -= lt;
            acc -= sys.obs_logdensity(rx.at(d), s);
            prev = s;
        }
        if (valid) {
            const double closing = sys.logp(prev, 0);
            if (closing > kNegInf) {
                acc -= closing;
                if (acc < best_metric) {  // lex order: strict < keeps the smallest
                    best_metric = acc;
                    best.states = digits;
                }
            }
        }
        if (idx + 1 == total) break;
        for (int d = N - 1; d >= 0; --d) {
            if (++digits[d] < S) break;
            digits[d] = 0;
        }
    }
    if (best.states.empty() && N > 0) {
        throw contract_error("hmm_brute_force: no valid sequence exists");
    }
    return best;
}

bool hmm_nll_confirm(const HmmSystem& sys, const ReceivedSequence& rx,
                     const StateSequence& candidate, int m, double rho, int M,
                     NllBoundary boundary) {
    if (!(rho > 0)) throw config_error("hmm_nll_confirm: rho must be positive");
    if (M < 1) throw config_error("hmm_nll_confirm: M must be a positive integer");
    if (!sys.bound_l || !sys.bound_u) {
        throw config_error("hmm_nll_confirm: bound functions are unset");
    }
    if (candidate.length() != rx.length()) {
        throw contract_error("hmm_nll_confirm: candidate/observation length mismatch");
    }
    const int Nh = rx.length();
    const int nu = sys.nu;
    if (m < 0 || m + nu - 1 >= Nh) {
        throw contract_error("hmm_nll_confirm: tested state index m+nu-1 out of range");
    }
    const double log_ptr = std::log(transition_ratio_bound(sys));
    const int H = 2 * M * nu;
    const int W = (2 * M + 1) * nu;

    if (boundary == NllBoundary::clip) {
        if (m - W < 0 || m + W > Nh) return false;
    }

    const int lo = std::max(m - H, 0);
    const int hi = std::min(m + H, Nh);
    const double inner_floor = 3.0 * nu * (rho - log_ptr);
    for (int d = lo; d < hi; ++d) {
        if (!(sys.bound_l(rx.at(d), candidate.states[d]) > inner_floor)) return false;
    }

    // Beyond a boundary every competing sequence is already pinned to the
    // zero state, which is exactly the merge the flank conditions buy.
    const bool need_left = boundary == NllBoundary::clip || m > 2 * M * nu;
    const bool need_right =
        boundary == NllBoundary::clip || m < Nh + 1 - nu - (2 * M - 1) * nu;
    const double base_budget = 3.0 * M * nu * rho;
    if (need_right) {
        if (m + W > Nh) return false;  // required flanks must be fully observed
        long double sum = 0;
        for (int d = m + H; d < m + W; ++d) sum += sys.bound_u(rx.at(d), candidate.states[d]);
        if (!(sum <= base_budget + (nu + 1) * log_ptr)) return false;
    }
    if (need_left) {
        if (m - W < 0) return false;
        long double sum = 0;
        for (int d = m - W; d < m - H; ++d) sum += sys.bound_u(rx.at(d), candidate.states[d]);
        if (!(sum <= base_budget + nu * log_ptr)) return false;
    }
    return true;
}

HmmSystem gaussian_conv_system(const GeneratorMatrix& code, const SymbolMapper& mapper,
                               double snr) {
    if (!(snr > 0)) throw config_error("gaussian_conv_system: snr must be positive");
    Trellis tr(code, 1);  // outputs and the shift structure are length-independent
    const int S = static_cast<int>(tr.num_states());
    const uint32_t Q = tr.num_inputs();
    const int n = code.n();

    HmmSystem sys;
    sys.num_states = S;
    sys.obs_dim = n;
    sys.trans_logp.assign(static_cast<size_t>(S) * S, kNegInf);
    const double lp = -std::log(static_cast<double>(Q));
    for (int p = 0; p < S; ++p) {
        for (uint32_t a = 0; a < Q; ++a) {
            sys.trans_logp[static_cast<size_t>(p) * S + tr.next_state(p, a)] = lp;
        }
    }

    sys.process.resize(S);
    auto g_out = std::make_shared<std::vector<double>>(static_cast<size_t>(S) * n);
    for (int s = 0; s < S; ++s) {
        const Sym* y = tr.output(s);
        int packed = 0;
        for (int j = n - 1; j >= 0; --j) packed = packed * code.q() + y[j];
        sys.process[s] = packed;
        for (int j = 0; j < n; ++j) (*g_out)[static_cast<size_t>(s) * n + j] = mapper(y[j]);
    }

    const double log_norm = 0.5 * n * std::log(snr / (2.0 * std::acos(-1.0)));
    auto res2 = [g_out, n](std::span<const double> r, int s) {
        double acc = 0;
        for (int j = 0; j < n; ++j) {
            const double e = r[j] - (*g_out)[static_cast<size_t>(s) * n + j];
            acc += e * e;
        }
        return acc;
    };
    sys.obs_logdensity = [res2, log_norm, snr](std::span<const double> r, int s) {
        return log_norm - 0.5 * snr * res2(r, s);
    };
    const auto dist = signal_distances(mapper, n);
    const double d_min = std::sqrt(dist.d_min2);
    const double d_max2 = dist.d_max2;
    sys.bound_l = [res2, snr, d_min](std::span<const double> r, int s) {
        return 0.5 * snr * d_min * (d_min - 2.0 * std::sqrt(res2(r, s)));
    };
    sys.bound_u = [res2, snr, d_max2](std::span<const double> r, int s) {
        return snr * (res2(r, s) + d_max2);
    };

    sys.nu = homogeneity_order(sys);
    if (!verify_observability(sys, sys.nu)) {
        throw config_error("gaussian_conv_system: code is not observable at its memory order");
    }
    sys.validate();
    return sys;
}

}  // namespace trellisml
