#include "trellisml/convcode.hpp"

#include <string>

namespace trellisml {

namespace {

uint64_t checked_pow(uint64_t base, int e, uint64_t limit) {
    uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > limit / base) return limit + 1;
        r *= base;
    }
    return r;
}

}  // namespace

GeneratorMatrix::GeneratorMatrix(PrimeField field, int k, int n, int nu,
                                 std::vector<Sym> taps_row_major)
    : field_(field), k_(k), n_(n), nu_(nu), taps_(std::move(taps_row_major)) {
    if (k < 1 || n < 1 || nu < 1) {
        throw config_error("generator dimensions must satisfy k,n,nu >= 1");
    }
    if (taps_.size() != static_cast<size_t>(nu) * k * n) {
        throw config_error("generator taps: expected " +
                           std::to_string(static_cast<size_t>(nu) * k * n) +
                           " entries, got " + std::to_string(taps_.size()));
    }
    for (Sym v : taps_) {
        if (v >= field_.q()) {
            throw config_error("generator tap value " + std::to_string(v) +
                               " out of range for GF(" + std::to_string(field_.q()) + ")");
        }
    }
    bool g0_nonzero = false;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j)
            if (tap(0, i, j) != 0) g0_nonzero = true;
    if (!g0_nonzero) {
        throw config_error("G[0] is all-zero: encoder is not delay-free");
    }
    if (!observable(field_, k_, n_, nu_, taps_)) {
        throw config_error(
            "generator rejected: a nonzero input symbol can leave the next nu "
            "codeword symbols unchanged (state observability fails)");
    }
}

GeneratorMatrix GeneratorMatrix::from_octal(uint32_t q, const std::vector<uint32_t>& octal) {
    if (q != 2) {
        throw config_error("octal generator notation is defined for q = 2 only");
    }
    if (octal.empty()) {
        throw config_error("octal generator list is empty");
    }
    int nu = 1;
    for (uint32_t g : octal) {
        int bits = 0;
        for (uint32_t v = g; v != 0; v >>= 1) ++bits;
        if (bits > nu) nu = bits;
    }
    const int n = static_cast<int>(octal.size());
    std::vector<Sym> taps(static_cast<size_t>(nu) * n, 0);
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < nu; ++l) {
            taps[static_cast<size_t>(l) * n + j] =
                static_cast<Sym>((octal[j] >> (nu - 1 - l)) & 1u);
        }
    }
    return GeneratorMatrix(PrimeField(2), 1, n, nu, std::move(taps));
}

uint64_t GeneratorMatrix::input_count() const {
    return checked_pow(field_.q(), k_, 1ull << 62);
}

uint64_t GeneratorMatrix::state_count() const {
    return checked_pow(field_.q(), k_ * nu_, 1ull << 62);
}

bool GeneratorMatrix::observable(const PrimeField& field, int k, int n, int nu,
                                 const std::vector<Sym>& taps) {
    // Enumerate difference windows e[m-nu+1 .. m+nu-1] with e[m] != 0 and
    // test whether the nu codeword symbols y[m .. m+nu) can all vanish.
    // Any such window embeds in a pair of messages differing at m whose
    // codewords agree on [m, m+nu).
    const uint64_t q = field.q();
    const int wlen = 2 * nu - 1;
    const uint64_t total = checked_pow(q, k * wlen, 1ull << 34);
    if (total > (1ull << 32)) {
        throw resource_error("observability check needs q^{k(2nu-1)} = too many windows");
    }
    auto tap_at = [&](int l, int i, int j) {
        return taps[(static_cast<size_t>(l) * k + i) * n + j];
    };
    std::vector<uint32_t> e(static_cast<size_t>(wlen) * k, 0);
    for (uint64_t w = 0; w < total; ++w) {
        uint64_t v = w;
        for (auto& x : e) {
            x = static_cast<uint32_t>(v % q);
            v /= q;
        }
        // position nu-1 of the window is index m
        bool m_nonzero = false;
        for (int i = 0; i < k; ++i)
            if (e[static_cast<size_t>(nu - 1) * k + i] != 0) m_nonzero = true;
        if (!m_nonzero) continue;

        bool all_outputs_zero = true;
        for (int d = 0; d < nu && all_outputs_zero; ++d) {
            // y[m+d] = sum_l e[m+d-l] G[l], window position of m+d-l is nu-1+d-l
            for (int j = 0; j < n; ++j) {
                uint64_t acc = 0;
                for (int l = 0; l < nu; ++l) {
                    int pos = nu - 1 + d - l;
                    if (pos < 0 || pos >= wlen) continue;
                    for (int i = 0; i < k; ++i) {
                        acc += static_cast<uint64_t>(e[static_cast<size_t>(pos) * k + i]) *
                               tap_at(l, i, j);
                    }
                }
                if (acc % q != 0) {
                    all_outputs_zero = false;
                    break;
                }
            }
        }
        if (all_outputs_zero) return false;
    }
    return true;
}

Codeword encode(const Message& msg, const GeneratorMatrix& code) {
    if (msg.k != code.k()) {
        throw contract_error("message symbol dimension " + std::to_string(msg.k) +
                             " does not match code k = " + std::to_string(code.k()));
    }
    const int N = msg.length();
    const int span = N + code.nu() - 1;
    const PrimeField& f = code.field();
    Codeword cw;
    cw.n = code.n();
    cw.sym.assign(static_cast<size_t>(span) * code.n(), 0);
    for (int d = 0; d < span; ++d) {
        for (int j = 0; j < code.n(); ++j) {
            uint32_t acc = 0;
            for (int l = 0; l < code.nu(); ++l) {
                const int src = d - l;
                if (src < 0 || src >= N) continue;
                for (int i = 0; i < code.k(); ++i) {
                    acc = f.add_raw(acc, f.mul_raw(msg.at(src, i), code.tap(l, i, j)));
                }
            }
            cw.sym[static_cast<size_t>(d) * code.n() + j] = static_cast<Sym>(acc);
        }
    }
    return cw;
}

std::vector<MarkovState> state_sequence(const Message& msg, const GeneratorMatrix& code) {
    if (msg.k != code.k()) {
        throw contract_error("message symbol dimension does not match code k");
    }
    const int N = msg.length();
    const int span = N + code.nu() - 1;
    std::vector<MarkovState> states(span);
    for (int d = 0; d < span; ++d) {
        MarkovState u(static_cast<size_t>(code.k()) * code.nu(), 0);
        for (int j = 0; j < code.nu(); ++j) {
            const int src = d - code.nu() + 1 + j;  // oldest first
            if (src < 0 || src >= N) continue;
            for (int i = 0; i < code.k(); ++i) {
                u[static_cast<size_t>(j) * code.k() + i] = msg.at(src, i);
            }
        }
        states[d] = std::move(u);
    }
    return states;
}

Trellis::Trellis(const GeneratorMatrix& code, int N, uint64_t state_budget)
    : code_(code), N_(N) {
    if (N < 1) throw contract_error("trellis length N must be >= 1");
    const uint64_t S = code.state_count();
    if (S > state_budget) {
        throw resource_error("trellis needs " + std::to_string(S) +
                             " states, budget is " + std::to_string(state_budget));
    }
    num_states_ = static_cast<uint32_t>(S);
    num_inputs_ = static_cast<uint32_t>(code.input_count());
    older_mod_ = static_cast<uint32_t>(S / num_inputs_);

    // Per-state output table: the window determines y completely.
    const PrimeField& f = code.field();
    const uint32_t q = f.q();
    outputs_.assign(static_cast<size_t>(num_states_) * code.n(), 0);
    std::vector<uint32_t> window(static_cast<size_t>(code.k()) * code.nu());
    for (uint32_t s = 0; s < num_states_; ++s) {
        // digit j of the state id = input at lag j; decode to symbol values
        uint32_t rem = s;
        for (int j = 0; j < code.nu(); ++j) {
            uint32_t a = rem % num_inputs_;
            rem /= num_inputs_;
            for (int i = 0; i < code.k(); ++i) {
                window[static_cast<size_t>(j) * code.k() + i] = a % q;
                a /= q;
            }
        }
        for (int j = 0; j < code.n(); ++j) {
            uint32_t acc = 0;
            for (int l = 0; l < code.nu(); ++l) {
                for (int i = 0; i < code.k(); ++i) {
                    acc = f.add_raw(
                        acc, f.mul_raw(window[static_cast<size_t>(l) * code.k() + i],
                                       code.tap(l, i, j)));
                }
            }
            outputs_[static_cast<size_t>(s) * code.n() + j] = static_cast<Sym>(acc);
        }
    }
}

bool Trellis::state_valid(int t, uint32_t s) const {
    for (int j = 0; j < code_.nu(); ++j) {
        const int src = t - j;
        if (src >= 0 && src < N_) continue;
        if (window_digit(s, j) != 0) return false;
    }
    return true;
}

uint32_t Trellis::window_digit(uint32_t s, int j) const {
    for (int i = 0; i < j; ++i) s /= num_inputs_;
    return s % num_inputs_;
}

void Trellis::input_symbols(uint32_t a, Sym* out) const {
    const uint32_t q = code_.q();
    for (int i = 0; i < code_.k(); ++i) {
        out[i] = static_cast<Sym>(a % q);
        a /= q;
    }
}

}  // namespace trellisml
