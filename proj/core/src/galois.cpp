#include "trellisml/galois.hpp"

#include <stdexcept>
#include <string>

namespace trellisml {

bool PrimeField::is_prime(uint32_t q) {
    if (q < 2) return false;
    if (q % 2 == 0) return q == 2;
    for (uint32_t d = 3; static_cast<uint64_t>(d) * d <= q; d += 2) {
        if (q % d == 0) return false;
    }
    return true;
}

PrimeField::PrimeField(uint32_t q) : q_(q) {
    if (!is_prime(q)) {
        throw config_error("q = " + std::to_string(q) + " is not prime");
    }
}

void PrimeField::check(FieldElement e) const {
    if (e.q != q_) {
        throw contract_error("field element belongs to GF(" + std::to_string(e.q) +
                             "), expected GF(" + std::to_string(q_) + ")");
    }
    if (e.value >= q_) {
        throw contract_error("field element value " + std::to_string(e.value) +
                             " out of range for GF(" + std::to_string(q_) + ")");
    }
}

FieldElement PrimeField::add(FieldElement a, FieldElement b) const {
    check(a);
    check(b);
    return {add_raw(a.value, b.value), q_};
}

FieldElement PrimeField::sub(FieldElement a, FieldElement b) const {
    check(a);
    check(b);
    return {sub_raw(a.value, b.value), q_};
}

FieldElement PrimeField::mul(FieldElement a, FieldElement b) const {
    check(a);
    check(b);
    return {mul_raw(a.value, b.value), q_};
}

FieldElement PrimeField::neg(FieldElement a) const {
    check(a);
    return {a.value == 0 ? 0 : q_ - a.value, q_};
}

FieldElement PrimeField::inv(FieldElement a) const {
    check(a);
    if (a.value == 0) {
        throw std::domain_error("inverse of zero in GF(" + std::to_string(q_) + ")");
    }
    // Fermat: a^(q-2) mod q.
    uint64_t base = a.value, result = 1, e = q_ - 2;
    while (e > 0) {
        if (e & 1) result = (result * base) % q_;
        base = (base * base) % q_;
        e >>= 1;
    }
    return {static_cast<uint32_t>(result), q_};
}

}  // namespace trellisml
