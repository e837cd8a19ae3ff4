#pragma once

#include <cstdint>

#include "trellisml/errors.hpp"

namespace trellisml {

// One symbol of GF(q). Carries its modulus so elements from different fields
// cannot be mixed silently; all arithmetic goes through PrimeField.
struct FieldElement {
    uint32_t value = 0;
    uint32_t q = 0;

    friend bool operator==(FieldElement a, FieldElement b) {
        return a.value == b.value && a.q == b.q;
    }
};

// Arithmetic over the prime field GF(q). Extension fields are out of scope.
class PrimeField {
public:
    explicit PrimeField(uint32_t q);

    uint32_t q() const { return q_; }

    FieldElement element(uint64_t v) const {
        return {static_cast<uint32_t>(v % q_), q_};
    }

    FieldElement add(FieldElement a, FieldElement b) const;
    FieldElement sub(FieldElement a, FieldElement b) const;
    FieldElement mul(FieldElement a, FieldElement b) const;
    FieldElement neg(FieldElement a) const;
    // Multiplicative inverse; throws std::domain_error for a == 0.
    FieldElement inv(FieldElement a) const;

    // Raw helpers for hot paths; operands must already be reduced mod q.
    uint32_t add_raw(uint32_t a, uint32_t b) const {
        uint32_t s = a + b;
        return s >= q_ ? s - q_ : s;
    }
    uint32_t sub_raw(uint32_t a, uint32_t b) const {
        return a >= b ? a - b : a + q_ - b;
    }
    uint32_t mul_raw(uint32_t a, uint32_t b) const {
        return static_cast<uint32_t>((static_cast<uint64_t>(a) * b) % q_);
    }

    static bool is_prime(uint32_t q);

private:
    void check(FieldElement e) const;

    uint32_t q_;
};

}  // namespace trellisml
