#include "trellisml/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace trellisml {

namespace {

constexpr long double kDead = std::numeric_limits<long double>::infinity();

uint64_t checked_pow(uint64_t base, int e, uint64_t limit) {
    uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > limit / base) return limit + 1;
        r *= base;
    }
    return r;
}

// Shared Viterbi forward pass. `admissible(t, s)` filters destination states
// on top of the trellis boundary structure; `prune_above`, when finite, kills
// states whose best incoming prefix metric strictly exceeds it.
class ViterbiEngine {
public:
    ViterbiEngine(const ReceivedSequence& rx, const Trellis& tr, const SymbolMapper& mapper)
        : rx_(rx), tr_(tr), S_(tr.num_states()), n_(tr.code().n()) {
        if (rx.n != n_ || rx.length() != tr.span()) {
            throw contract_error("decoder: received sequence shape does not match trellis");
        }
        const uint64_t cells = static_cast<uint64_t>(tr.span()) * S_;
        if (cells > (1ull << 26)) {
            throw resource_error("trellis DP table too large: " + std::to_string(cells));
        }
        gout_.resize(static_cast<size_t>(S_) * n_);
        for (uint32_t s = 0; s < S_; ++s) {
            const Sym* y = tr.output(s);
            for (int j = 0; j < n_; ++j) gout_[static_cast<size_t>(s) * n_ + j] = mapper(y[j]);
        }
        bp_.assign(cells, 0);
        prev_.assign(S_, kDead);
        cur_.assign(S_, kDead);
    }

    template <class Admissible>
    DecodeResult run(Admissible admissible, double prune_above, bool certified,
                     const SymbolMapper& mapper) {
        const int span = tr_.span();
        const int N = tr_.N();
        uint64_t visited = 0;

        for (int t = 0; t < span; ++t) {
            std::fill(cur_.begin(), cur_.end(), kDead);
            const uint32_t choices = tr_.input_choices(t);
            if (t == 0) {
                for (uint32_t a = 0; a < choices; ++a) {
                    const uint32_t s = tr_.next_state(0, a);
                    if (!tr_.state_valid(0, s) || !admissible(0, s)) continue;
                    relax(t, s, 0, branch(t, s));
                }
            } else {
                for (uint32_t p = 0; p < S_; ++p) {
                    if (prev_[p] == kDead) continue;
                    for (uint32_t a = 0; a < choices; ++a) {
                        const uint32_t s = tr_.next_state(p, a);
                        if (!tr_.state_valid(t, s) || !admissible(t, s)) continue;
                        relax(t, s, p, prev_[p] + branch(t, s));
                    }
                }
            }
            uint32_t alive = 0;
            for (uint32_t s = 0; s < S_; ++s) {
                if (cur_[s] == kDead) continue;
                if (prune_above >= 0 && cur_[s] > prune_above) {
                    cur_[s] = kDead;  // no completion of this prefix can beat the guess
                    continue;
                }
                ++alive;
            }
            if (alive == 0) {
                throw contract_error("decoder: no admissible state at time index " +
                                     std::to_string(t));
            }
            visited += alive;
            std::swap(prev_, cur_);
        }

        // Best terminal state, lexicographic history on exact ties.
        uint32_t best = 0;
        long double best_metric = kDead;
        for (uint32_t s = 0; s < S_; ++s) {
            if (prev_[s] == kDead) continue;
            if (prev_[s] < best_metric ||
                (prev_[s] == best_metric && history_less(span - 1, s, span - 1, best))) {
                best_metric = prev_[s];
                best = s;
            }
        }

        Message msg;
        msg.k = tr_.code().k();
        msg.sym.assign(static_cast<size_t>(N) * msg.k, 0);
        {
            uint32_t s = best;
            for (int t = span - 1; t >= 0; --t) {
                if (t < N) tr_.input_symbols(tr_.newest_input(s), &msg.at(t, 0));
                s = bp_[static_cast<size_t>(t) * S_ + s];
            }
        }

        DecodeResult out;
        out.message = std::move(msg);
        out.metric = negative_sll(rx_, encode(out.message, tr_.code()), mapper);
        out.stats.visited_states = visited;
        out.stats.time_span = span;
        out.stats.normalized = static_cast<double>(visited) / N;
        out.certified_ml = certified;
        return out;
    }

private:
    double branch(int t, uint32_t s) const {
        const double* g = gout_.data() + static_cast<size_t>(s) * n_;
        const double* r = rx_.samples.data() + static_cast<size_t>(t) * n_;
        double acc = 0;
        for (int j = 0; j < n_; ++j) {
            const double e = r[j] - g[j];
            acc += e * e;
        }
        return acc;
    }

    void relax(int t, uint32_t s, uint32_t p, long double cand) {
        if (cand < cur_[s]) {
            cur_[s] = cand;
            bp_[static_cast<size_t>(t) * S_ + s] = p;
        } else if (cand == cur_[s] && t > 0) {
            // exact tie: keep the lexicographically smaller input history
            const uint32_t inc = bp_[static_cast<size_t>(t) * S_ + s];
            if (history_less(t - 1, p, t - 1, inc)) {
                bp_[static_cast<size_t>(t) * S_ + s] = p;
            }
        }
    }

    std::vector<uint32_t> history(int t, uint32_t s) const {
        std::vector<uint32_t> h(static_cast<size_t>(t) + 1);
        for (int i = t; i >= 0; --i) {
            h[i] = tr_.newest_input(s);
            s = bp_[static_cast<size_t>(i) * S_ + s];
        }
        return h;
    }

    bool history_less(int ta, uint32_t sa, int tb, uint32_t sb) const {
        const auto ha = history(ta, sa);
        const auto hb = history(tb, sb);
        return std::lexicographical_compare(ha.begin(), ha.end(), hb.begin(), hb.end());
    }

    const ReceivedSequence& rx_;
    const Trellis& tr_;
    uint32_t S_;
    int n_;
    std::vector<double> gout_;
    std::vector<long double> prev_, cur_;
    std::vector<uint32_t> bp_;
};

uint32_t input_index_of(const Message& msg, int d, uint32_t q) {
    uint32_t a = 0;
    for (int i = msg.k - 1; i >= 0; --i) a = a * q + msg.at(d, i);
    return a;
}

}  // namespace

DecodeResult viterbi_decode(const ReceivedSequence& rx, const Trellis& trellis,
                            const SymbolMapper& mapper) {
    ViterbiEngine eng(rx, trellis, mapper);
    return eng.run([](int, uint32_t) { return true; }, -1.0, true, mapper);
}

DecodeResult brute_force_ml(const ReceivedSequence& rx, const GeneratorMatrix& code,
                            const SymbolMapper& mapper, int N, uint64_t budget) {
    const uint64_t total = checked_pow(code.q(), code.k() * N, budget);
    if (total > budget) {
        throw resource_error("brute_force_ml: q^{kN} exceeds budget " + std::to_string(budget));
    }
    const uint32_t Q = static_cast<uint32_t>(code.input_count());
    Message msg;
    msg.k = code.k();
    msg.sym.assign(static_cast<size_t>(N) * code.k(), 0);

    Message best_msg = msg;
    long double best = kDead;
    std::vector<uint32_t> digits(N, 0);
    for (uint64_t idx = 0;; ++idx) {
        for (int d = 0; d < N; ++d) {
            uint32_t a = digits[d];
            for (int i = 0; i < code.k(); ++i) {
                msg.at(d, i) = static_cast<Sym>(a % code.q());
                a /= code.q();
            }
        }
        const Codeword cw = encode(msg, code);
        long double metric = 0;
        for (int d = 0; d < cw.length(); ++d) {
            metric += branch_metric(rx.at(d), {cw.at(d), static_cast<size_t>(cw.n)}, mapper);
        }
        if (metric < best) {  // lex enumeration order: strict < keeps the smallest
            best = metric;
            best_msg = msg;
        }
        if (idx + 1 == total) break;
        // odometer with x[0] most significant, so enumeration is lexicographic
        for (int d = N - 1; d >= 0; --d) {
            if (++digits[d] < Q) break;
            digits[d] = 0;
        }
    }

    DecodeResult out;
    out.message = std::move(best_msg);
    out.metric = static_cast<double>(best);
    out.stats.visited_states = total;
    out.stats.time_span = N + code.nu() - 1;
    out.stats.normalized = static_cast<double>(total) / N;
    out.certified_ml = true;
    return out;
}

double sphere_branch_lower_bound(const ReceivedSequence& rx, const Message& prefix,
                                 const GeneratorMatrix& code, const SymbolMapper& mapper) {
    if (prefix.length() == 0) return 0;
    if (prefix.k != code.k()) throw contract_error("sphere bound: prefix dimension mismatch");
    const int m = prefix.length() - 1;
    if (m >= rx.length()) throw contract_error("sphere bound: prefix longer than observations");
    const PrimeField& f = code.field();
    long double acc = 0;
    std::vector<Sym> y(code.n());
    for (int d = 0; d <= m; ++d) {
        for (int j = 0; j < code.n(); ++j) {
            uint32_t v = 0;
            for (int l = 0; l < code.nu(); ++l) {
                const int src = d - l;
                if (src < 0 || src > m) continue;
                for (int i = 0; i < code.k(); ++i) {
                    v = f.add_raw(v, f.mul_raw(prefix.at(src, i), code.tap(l, i, j)));
                }
            }
            y[j] = static_cast<Sym>(v);
        }
        acc += branch_metric(rx.at(d), y, mapper);
    }
    return static_cast<double>(acc);
}

DecodeResult sll_augmented_viterbi(const ReceivedSequence& rx, const Trellis& trellis,
                                   const SymbolMapper& mapper, const Message& guess) {
    const double s_guess = negative_sll(rx, encode(guess, trellis.code()), mapper);
    ViterbiEngine eng(rx, trellis, mapper);
    // The guess's own prefix never exceeds its total metric, so at least one
    // state survives at every index and the ML path is never pruned.
    return eng.run([](int, uint32_t) { return true; }, s_guess, true, mapper);
}

double codeword_distance_bound(const GeneratorMatrix& code, int N,
                               const SymbolMapper& mapper) {
    Trellis tr(code, N);
    const uint32_t S = tr.num_states();
    const int n = code.n();
    const uint32_t q = code.q();

    // Weight of one difference symbol, minimized over the base codeword so
    // the sum lower-bounds ||g(y+e) - g(y)||^2 for any y. Exact for q = 2.
    std::vector<double> coord_w(q, 0);
    for (uint32_t e = 1; e < q; ++e) {
        double w = std::numeric_limits<double>::infinity();
        for (uint32_t a = 0; a < q; ++a) {
            const double g = mapper(static_cast<Sym>((a + e) % q)) - mapper(static_cast<Sym>(a));
            w = std::min(w, g * g);
        }
        coord_w[e] = w;
    }
    std::vector<double> state_w(S, 0);
    for (uint32_t s = 0; s < S; ++s) {
        const Sym* y = tr.output(s);
        double w = 0;
        for (int j = 0; j < n; ++j) w += coord_w[y[j]];
        state_w[s] = w;
    }

    std::vector<double> prev(S, std::numeric_limits<double>::infinity());
    std::vector<double> cur(S, std::numeric_limits<double>::infinity());
    const int span = tr.span();
    for (int t = 0; t < span; ++t) {
        std::fill(cur.begin(), cur.end(), std::numeric_limits<double>::infinity());
        const uint32_t choices = tr.input_choices(t);
        if (t == 0) {
            for (uint32_t a = 1; a < choices; ++a) {  // force a nonzero first difference
                const uint32_t s = tr.next_state(0, a);
                cur[s] = state_w[s];
            }
            if (choices == 1) {
                throw contract_error("distance bound: no nonzero difference fits length N");
            }
        } else {
            for (uint32_t p = 0; p < S; ++p) {
                if (!std::isfinite(prev[p])) continue;
                for (uint32_t a = 0; a < choices; ++a) {
                    const uint32_t s = tr.next_state(p, a);
                    cur[s] = std::min(cur[s], prev[p] + state_w[s]);
                }
            }
        }
        std::swap(prev, cur);
    }
    return prev[0];  // zero-tail inputs park every difference path at state 0
}

bool whole_codeword_optimality_test(const ReceivedSequence& rx, const Message& guess,
                                    double distance_bound, const GeneratorMatrix& code,
                                    const SymbolMapper& mapper) {
    if (distance_bound <= 0) return false;
    const double s = negative_sll(rx, encode(guess, code), mapper);
    // Block triangle inequality: any other codeword sits at block distance
    // >= sqrt(distance_bound) from the guess, hence at squared distance
    // >= (sqrt(bound) - sqrt(s))^2 from the observation.
    const double slack = std::sqrt(distance_bound) - std::sqrt(s);
    if (slack <= 0) return false;
    return slack * slack > s;
}

namespace {

bool g0_full_row_rank(const GeneratorMatrix& code) {
    const int k = code.k(), n = code.n();
    const uint32_t q = code.q();
    const PrimeField& f = code.field();
    std::vector<uint32_t> a(static_cast<size_t>(k) * n);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<size_t>(i) * n + j] = code.tap(0, i, j);
    int rank = 0;
    for (int col = 0; col < n && rank < k; ++col) {
        int pivot = -1;
        for (int row = rank; row < k; ++row) {
            if (a[static_cast<size_t>(row) * n + col] != 0) {
                pivot = row;
                break;
            }
        }
        if (pivot < 0) continue;
        for (int j = 0; j < n; ++j)
            std::swap(a[static_cast<size_t>(pivot) * n + j], a[static_cast<size_t>(rank) * n + j]);
        const uint32_t inv = f.inv(f.element(a[static_cast<size_t>(rank) * n + col])).value;
        for (int j = 0; j < n; ++j)
            a[static_cast<size_t>(rank) * n + j] = f.mul_raw(a[static_cast<size_t>(rank) * n + j], inv);
        for (int row = 0; row < k; ++row) {
            if (row == rank) continue;
            const uint32_t factor = a[static_cast<size_t>(row) * n + col];
            if (factor == 0) continue;
            for (int j = 0; j < n; ++j) {
                a[static_cast<size_t>(row) * n + j] = f.sub_raw(
                    a[static_cast<size_t>(row) * n + j],
                    f.mul_raw(factor, a[static_cast<size_t>(rank) * n + j]));
            }
        }
        ++rank;
    }
    return rank == k;
}

Message decision_feedback_decode(const ReceivedSequence& rx, const Trellis& tr,
                                 const SymbolMapper& mapper, uint64_t* visited_out) {
    const int N = tr.N();
    const int n = tr.code().n();
    Message msg;
    msg.k = tr.code().k();
    msg.sym.assign(static_cast<size_t>(N) * msg.k, 0);
    uint32_t state = 0;
    for (int d = 0; d < N; ++d) {
        uint32_t best_a = 0;
        double best = std::numeric_limits<double>::infinity();
        for (uint32_t a = 0; a < tr.num_inputs(); ++a) {
            const uint32_t s = tr.next_state(state, a);
            const Sym* y = tr.output(s);
            double acc = 0;
            const double* r = rx.samples.data() + static_cast<size_t>(d) * n;
            for (int j = 0; j < n; ++j) {
                const double e = r[j] - mapper(y[j]);
                acc += e * e;
            }
            if (acc < best) {  // ties keep the smaller input index
                best = acc;
                best_a = a;
            }
        }
        state = tr.next_state(state, best_a);
        tr.input_symbols(best_a, &msg.at(d, 0));
    }
    if (visited_out) *visited_out = static_cast<uint64_t>(N);
    return msg;
}

struct BeamNode {
    int parent = -1;
    uint32_t input = 0;
};

Message list_decode(const ReceivedSequence& rx, const Trellis& tr, const SymbolMapper& mapper,
                    int L, uint64_t* visited_out) {
    if (L < 1) throw config_error("list decoder requires L >= 1");
    const int span = tr.span();
    const int N = tr.N();
    const int n = tr.code().n();
    const uint32_t S = tr.num_states();

    struct Entry {
        uint32_t state = 0;
        long double metric = 0;
        int node = -1;
    };
    std::vector<BeamNode> arena;
    std::vector<Entry> beam{{0u, 0.0L, -1}};
    uint64_t visited = 0;

    auto hist = [&](const Entry& e) {
        std::vector<uint32_t> h;
        for (int i = e.node; i >= 0; i = arena[i].parent) h.push_back(arena[i].input);
        std::reverse(h.begin(), h.end());
        return h;
    };
    auto lex_less = [&](const Entry& a, const Entry& b) {
        const auto ha = hist(a), hb = hist(b);
        return std::lexicographical_compare(ha.begin(), ha.end(), hb.begin(), hb.end());
    };

    for (int t = 0; t < span; ++t) {
        const uint32_t choices = tr.input_choices(t);
        std::vector<Entry> expanded;
        expanded.reserve(beam.size() * choices);
        for (const Entry& e : beam) {
            for (uint32_t a = 0; a < choices; ++a) {
                const uint32_t s = tr.next_state(e.state, a);
                if (!tr.state_valid(t, s)) continue;
                const Sym* y = tr.output(s);
                const double* r = rx.samples.data() + static_cast<size_t>(t) * n;
                double bm = 0;
                for (int j = 0; j < n; ++j) {
                    const double err = r[j] - mapper(y[j]);
                    bm += err * err;
                }
                arena.push_back({e.node, a});
                expanded.push_back({s, e.metric + bm, static_cast<int>(arena.size()) - 1});
            }
        }
        // Keep the best prefix per state, then the best L states overall:
        // with L = q^{k nu} this is exactly the Viterbi forward pass.
        std::vector<int> best_per_state(S, -1);
        for (size_t i = 0; i < expanded.size(); ++i) {
            int& slot = best_per_state[expanded[i].state];
            if (slot < 0 || expanded[i].metric < expanded[slot].metric ||
                (expanded[i].metric == expanded[slot].metric &&
                 lex_less(expanded[i], expanded[slot]))) {
                slot = static_cast<int>(i);
            }
        }
        std::vector<Entry> dedup;
        for (uint32_t s = 0; s < S; ++s) {
            if (best_per_state[s] >= 0) dedup.push_back(expanded[best_per_state[s]]);
        }
        std::sort(dedup.begin(), dedup.end(), [&](const Entry& a, const Entry& b) {
            if (a.metric != b.metric) return a.metric < b.metric;
            return lex_less(a, b);
        });
        if (static_cast<int>(dedup.size()) > L) dedup.resize(L);
        beam = std::move(dedup);
        visited += beam.size();
    }

    const Entry& best = beam.front();
    const auto h = hist(best);
    Message msg;
    msg.k = tr.code().k();
    msg.sym.assign(static_cast<size_t>(N) * msg.k, 0);
    for (int t = 0; t < N && t < static_cast<int>(h.size()); ++t) {
        tr.input_symbols(h[t], &msg.at(t, 0));
    }
    if (visited_out) *visited_out = visited;
    return msg;
}

}  // namespace

Message suboptimal_decode(const ReceivedSequence& rx, const Trellis& trellis,
                          const SymbolMapper& mapper, const SuboptimalStrategy& strategy,
                          uint64_t* visited_out) {
    if (rx.n != trellis.code().n() || rx.length() != trellis.span()) {
        throw contract_error("suboptimal_decode: received sequence shape mismatch");
    }
    switch (strategy.kind) {
        case SuboptimalStrategy::Kind::decision_feedback:
            if (!g0_full_row_rank(trellis.code())) {
                throw config_error(
                    "decision_feedback needs G[0] of full row rank; use the list strategy");
            }
            return decision_feedback_decode(rx, trellis, mapper, visited_out);
        case SuboptimalStrategy::Kind::list:
            return list_decode(rx, trellis, mapper, strategy.list_size, visited_out);
    }
    throw contract_error("unknown suboptimal strategy");
}

NllParams NllParams::validated(double xi, int M, double d_min2, double d_max2, int nu) {
    if (!(d_min2 > 0) || !(d_max2 >= d_min2)) {
        throw config_error("nll params: need 0 < d_min2 <= d_max2");
    }
    if (nu < 1) throw config_error("nll params: nu must be >= 1");
    if (!(xi > 0) || !(xi < d_min2 / 2)) {
        throw config_error("nll params: xi must satisfy 0 < xi < d_min2/2");
    }
    if (!(static_cast<double>(M) > nu * d_max2 / (3 * xi))) {
        throw config_error("nll params: M must satisfy M > nu*d_max2/(3*xi)");
    }
    return {xi, M, d_min2, d_max2, nu};
}

NllParams NllParams::defaults_for(const SymbolMapper& mapper, int n, int nu) {
    const auto d = signal_distances(mapper, n);
    const double xi = d.d_min2 / 4;
    const double bound = nu * d.d_max2 / (3 * xi);
    const int M = static_cast<int>(std::floor(bound)) + 1;  // smallest strict integer
    return validated(xi, M, d.d_min2, d.d_max2, nu);
}

NllParams NllParams::feasible_for(double xi, const SymbolMapper& mapper, int n, int nu) {
    const auto d = signal_distances(mapper, n);
    const int M = static_cast<int>(std::floor(nu * d.d_max2 / xi)) + 1;
    return validated(xi, M, d.d_min2, d.d_max2, nu);
}

namespace {

struct NllScan {
    int span = 0;
    int N = 0;
    // prefix sums over [0, d): count of inner-condition passes, residual mass
    std::vector<int> ok_prefix;
    std::vector<long double> res2_prefix;

    int ok_count(int lo, int hi) const { return ok_prefix[hi] - ok_prefix[lo]; }
    long double res2_sum(int lo, int hi) const { return res2_prefix[hi] - res2_prefix[lo]; }
};

NllScan build_scan(const ReceivedSequence& rx, const Codeword& cand, const NllParams& params,
                   const SymbolMapper& mapper, const NllOptions& options) {
    if (rx.n != cand.n || rx.length() != cand.length()) {
        throw contract_error("nll: candidate and observations have different shapes");
    }
    NllScan scan;
    scan.span = cand.length();
    scan.N = scan.span - params.nu + 1;
    scan.ok_prefix.assign(scan.span + 1, 0);
    scan.res2_prefix.assign(scan.span + 1, 0);
    const double t = params.d_min2 / 2 - params.xi;
    const double ok_limit = options.condition_a == NllConditionA::literal ? t * t : t;
    for (int d = 0; d < scan.span; ++d) {
        const double r2 =
            branch_metric(rx.at(d), {cand.at(d), static_cast<size_t>(cand.n)}, mapper);
        scan.ok_prefix[d + 1] = scan.ok_prefix[d] + (r2 < ok_limit ? 1 : 0);
        scan.res2_prefix[d + 1] = scan.res2_prefix[d] + r2;
    }
    return scan;
}

bool confirm_at(const NllScan& scan, const NllParams& params, const NllOptions& options, int m) {
    const int H = params.inner_halfwidth();     // 2 M nu
    const int W = params.window_halfwidth();    // (2M+1) nu
    const long double budget = params.flank_budget();

    if (options.boundary == NllBoundary::clip) {
        if (m - W < 0 || m + W > scan.span) return false;
    }

    const int lo = std::max(m - H, 0);
    const int hi = std::min(m + H, scan.span);
    if (scan.ok_count(lo, hi) != hi - lo) return false;

    // A flank condition is only needed on a side where a competing path
    // could stay distinct beyond the inner window; near a boundary every
    // path is forced through the zero state, which plays that role.
    const bool need_left =
        options.boundary == NllBoundary::clip || m > 2 * params.M * params.nu;
    const bool need_right = options.boundary == NllBoundary::clip ||
                            m < scan.N - (2 * params.M - 1) * params.nu;
    if (need_right) {
        if (m + W > scan.span) return false;  // required flank must be fully observed
        if (scan.res2_sum(m + H, m + W) > budget) return false;
    }
    if (need_left) {
        if (m - W < 0) return false;
        if (scan.res2_sum(m - W, m - H) > budget) return false;
    }
    return true;
}

}  // namespace

bool nll_confirm(const ReceivedSequence& rx, const Codeword& candidate, int m,
                 const NllParams& params, const SymbolMapper& mapper,
                 const NllOptions& options) {
    NllParams::validated(params.xi, params.M, params.d_min2, params.d_max2, params.nu);
    const NllScan scan = build_scan(rx, candidate, params, mapper, options);
    if (m < 0 || m >= scan.N) {
        throw contract_error("nll_confirm: m must lie in [0, N)");
    }
    return confirm_at(scan, params, options, m);
}

SymbolSetSequence build_symbol_sets(const ReceivedSequence& rx, const Message& guess,
                                    const NllParams& params, const Trellis& trellis,
                                    const SymbolMapper& mapper, const NllOptions& options) {
    NllParams::validated(params.xi, params.M, params.d_min2, params.d_max2, params.nu);
    if (params.nu != trellis.code().nu()) {
        throw contract_error("build_symbol_sets: params.nu does not match the code");
    }
    const Codeword cand = encode(guess, trellis.code());
    const NllScan scan = build_scan(rx, cand, params, mapper, options);
    const int N = trellis.N();

    SymbolSetSequence sets;
    sets.alphabet_size = trellis.num_inputs();
    sets.singleton.assign(N, 0);
    sets.confirmed.assign(N, 0);
    for (int d = 0; d < N; ++d) {
        sets.confirmed[d] = input_index_of(guess, d, trellis.code().q());
    }
    for (int m = 0; m < N; ++m) {
        if (!confirm_at(scan, params, options, m)) continue;
        for (int d = m; d < std::min(m + params.nu, N); ++d) sets.singleton[d] = 1;
    }
    return sets;
}

DecodeResult modified_viterbi(const ReceivedSequence& rx, const Trellis& trellis,
                              const SymbolMapper& mapper, const SymbolSetSequence& sets) {
    if (sets.length() != trellis.N()) {
        throw contract_error("modified_viterbi: sets do not cover [0, N)");
    }
    const int N = trellis.N();
    const int nu = trellis.code().nu();
    ViterbiEngine eng(rx, trellis, mapper);
    auto admissible = [&](int t, uint32_t s) {
        for (int j = 0; j < nu; ++j) {
            const int src = t - j;
            if (src < 0 || src >= N) continue;  // boundary zeros handled by state_valid
            if (sets.is_singleton(src) &&
                trellis.window_digit(s, j) != sets.confirmed[src]) {
                return false;
            }
        }
        return true;
    };
    return eng.run(admissible, -1.0, true, mapper);
}

ThreeStepResult three_step_decode(const ReceivedSequence& rx, const Trellis& trellis,
                                  const SymbolMapper& mapper, const NllParams& params,
                                  const SuboptimalStrategy& strategy,
                                  const NllOptions& options) {
    ThreeStepResult out;
    const Message guess = suboptimal_decode(rx, trellis, mapper, strategy, &out.step1_visited);
    const SymbolSetSequence sets = build_symbol_sets(rx, guess, params, trellis, mapper, options);
    out.result = modified_viterbi(rx, trellis, mapper, sets);
    out.step2_ops = static_cast<uint64_t>(trellis.span()) + trellis.N();
    int singles = 0;
    for (int d = 0; d < sets.length(); ++d) singles += sets.is_singleton(d) ? 1 : 0;
    out.singleton_fraction = sets.length() ? static_cast<double>(singles) / sets.length() : 0;
    return out;
}

}  // namespace trellisml
