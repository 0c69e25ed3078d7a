#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "bpfl/rng.hpp"

namespace bpfl {

/// Residue mod the field prime, held in Montgomery form (4 x 64-bit limbs,
/// little-endian). Values are meaningful only relative to the Field that
/// produced them. Immutable value type, safe to copy and share.
struct Fe {
    std::array<std::uint64_t, 4> limbs{};
    friend bool operator==(const Fe&, const Fe&) = default;
};

struct FieldParams {
    std::string modulus_dec;   ///< prime modulus p, decimal (config wire form)
    unsigned two_adicity = 0;  ///< largest a with 2^a | p-1
    unsigned hash_exponent = 0;///< e with gcd(e, p-1) = 1, used by the hash permutation
};

/// Default production field: the BN254 scalar prime
/// (254 bits, two-adicity 28, gcd(5, p-1) = 1).
FieldParams bn254_scalar_params();
/// 61-bit field for statistical tests (two-adicity 24, e = 5).
FieldParams test_field_61_params();
/// Toy field p = 251 for exhaustive enumeration (e = 3).
FieldParams toy_field_251_params();

/// Prime-field arithmetic context. Construction validates the structural
/// facts (p odd prime < 2^255, stated two-adicity exact, gcd(e, p-1) = 1);
/// `require_production_invariants` additionally enforces the deployment
/// bounds (p > 2^192, two-adicity >= 20).
class Field {
public:
    explicit Field(const FieldParams& params);

    void require_production_invariants() const;

    const FieldParams& params() const { return params_; }
    const mpz_class& modulus() const { return p_; }
    unsigned bits() const { return bits_; }
    unsigned two_adicity() const { return params_.two_adicity; }
    unsigned hash_exponent() const { return params_.hash_exponent; }

    Fe zero() const { return Fe{}; }
    Fe one() const { return one_; }

    Fe from_mpz(const mpz_class& x) const;      // reduces mod p
    Fe from_u64(std::uint64_t x) const;
    Fe from_i64(std::int64_t x) const;
    mpz_class to_mpz(const Fe& a) const;        // canonical in [0, p)
    /// Signed representative in (-p/2, p/2].
    mpz_class signed_lift(const Fe& a) const;

    bool is_zero(const Fe& a) const { return a == Fe{}; }

    Fe add(const Fe& a, const Fe& b) const {
        Fe out;
        std::uint64_t carry = 0;
        for (int i = 0; i < 4; ++i) {
            unsigned __int128 s = (unsigned __int128)a.limbs[i] + b.limbs[i] + carry;
            out.limbs[i] = (std::uint64_t)s;
            carry = (std::uint64_t)(s >> 64);
        }
        // p < 2^255 so a+b < 2^256: reduce once if needed
        if (carry || geq(out.limbs, mod_)) sub_in_place(out.limbs, mod_);
        return out;
    }
    Fe sub(const Fe& a, const Fe& b) const {
        Fe out = a;
        if (!geq(out.limbs, b.limbs)) {
            std::uint64_t carry = 0;
            for (int i = 0; i < 4; ++i) {
                unsigned __int128 s = (unsigned __int128)out.limbs[i] + mod_[i] + carry;
                out.limbs[i] = (std::uint64_t)s;
                carry = (std::uint64_t)(s >> 64);
            }
        }
        sub_in_place(out.limbs, b.limbs);
        return out;
    }
    Fe neg(const Fe& a) const {
        if (is_zero(a)) return a;
        Fe out;
        out.limbs = mod_;
        sub_in_place(out.limbs, a.limbs);
        return out;
    }
    Fe mul(const Fe& a, const Fe& b) const {
        Fe out;
        out.limbs = mont_mul(a.limbs, b.limbs);
        return out;
    }
    Fe sqr(const Fe& a) const { return mul(a, a); }
    Fe inv(const Fe& a) const;                  // throws on zero
    Fe pow(const Fe& a, const mpz_class& e) const;
    Fe pow_u64(const Fe& a, std::uint64_t e) const;

    /// In-place batch inversion (Montgomery trick); throws if any entry is zero.
    void batch_inv(std::span<Fe> xs) const;

    /// Uniform element via rejection sampling.
    Fe sample(Rng& rng) const;

    /// Generator of the order-2^log2_order subgroup, derived deterministically.
    /// Throws if log2_order exceeds the field's two-adicity.
    Fe root_of_unity(unsigned log2_order) const;

    /// Canonical 32-byte big-endian encoding.
    std::array<std::uint8_t, 32> to_bytes(const Fe& a) const;
    Fe from_bytes(std::span<const std::uint8_t> b) const; // throws FormatError if >= p

private:
    using Limbs = std::array<std::uint64_t, 4>;

    static bool geq(const Limbs& a, const Limbs& b) {
        for (int i = 3; i >= 0; --i) {
            if (a[i] != b[i]) return a[i] > b[i];
        }
        return true;
    }

    static void sub_in_place(Limbs& a, const Limbs& b) {
        std::uint64_t borrow = 0;
        for (int i = 0; i < 4; ++i) {
            unsigned __int128 d = (unsigned __int128)a[i] - b[i] - borrow;
            a[i] = (std::uint64_t)d;
            borrow = (std::uint64_t)(d >> 64) & 1;
        }
    }

    // CIOS Montgomery product; valid for any odd modulus < 2^255 with
    // canonical inputs.
    Limbs mont_mul(const Limbs& a, const Limbs& b) const {
        using u128 = unsigned __int128;
        std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
        for (int i = 0; i < 4; ++i) {
            std::uint64_t carry = 0;
            for (int j = 0; j < 4; ++j) {
                u128 cur = (u128)t[j] + (u128)a[i] * b[j] + carry;
                t[j] = (std::uint64_t)cur;
                carry = (std::uint64_t)(cur >> 64);
            }
            u128 cur = (u128)t[4] + carry;
            t[4] = (std::uint64_t)cur;
            t[5] = (std::uint64_t)(cur >> 64);

            std::uint64_t m = t[0] * n0inv_;
            cur = (u128)t[0] + (u128)m * mod_[0];
            carry = (std::uint64_t)(cur >> 64);
            for (int j = 1; j < 4; ++j) {
                cur = (u128)t[j] + (u128)m * mod_[j] + carry;
                t[j - 1] = (std::uint64_t)cur;
                carry = (std::uint64_t)(cur >> 64);
            }
            cur = (u128)t[4] + carry;
            t[3] = (std::uint64_t)cur;
            t[4] = t[5] + (std::uint64_t)(cur >> 64);
        }
        Limbs out{t[0], t[1], t[2], t[3]};
        if (t[4] || geq(out, mod_)) sub_in_place(out, mod_);
        return out;
    }

    FieldParams params_;
    mpz_class p_;
    Limbs mod_{};
    Limbs r2_{};        // (2^256)^2 mod p
    Fe one_;            // 2^256 mod p (Montgomery one)
    std::uint64_t n0inv_ = 0; // -p^{-1} mod 2^64
    unsigned bits_ = 0;
    Fe two_adic_root_;  // generator of the full 2^two_adicity subgroup
};

} // namespace bpfl
