#include "bpfl/field.hpp"

#include <stdexcept>

#include "bpfl/errors.hpp"
#include "bpfl/numeric.hpp"

namespace bpfl {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using Limbs = std::array<u64, 4>;

Limbs limbs_from_mpz(const mpz_class& x) {
    Limbs out{};
    size_t count = 0;
    mpz_export(out.data(), &count, -1, sizeof(u64), 0, 0, x.get_mpz_t());
    return out;
}

mpz_class mpz_from_limbs(const Limbs& l) {
    mpz_class out;
    mpz_import(out.get_mpz_t(), 4, -1, sizeof(u64), 0, 0, l.data());
    return out;
}

} // namespace

FieldParams bn254_scalar_params() {
    return FieldParams{
        "21888242871839275222246405745257275088548364400416034343698204186575808495617",
        28, 5};
}

FieldParams test_field_61_params() {
    return FieldParams{"1152921505194049537", 24, 5};
}

FieldParams toy_field_251_params() {
    return FieldParams{"251", 1, 3};
}

Field::Field(const FieldParams& params) : params_(params) {
    if (params.modulus_dec.empty()) throw ConfigError("field: empty modulus");
    p_ = mpz_class(params.modulus_dec);
    if (p_ < 3 || mpz_even_p(p_.get_mpz_t()))
        throw ConfigError("field: modulus must be an odd prime >= 3");
    bits_ = static_cast<unsigned>(mpz_sizeinbase(p_.get_mpz_t(), 2));
    if (bits_ > 255) throw ConfigError("field: modulus must be < 2^255");

    Rng check_rng(0x9d2c5680u);
    if (!is_probable_prime(p_, 32, check_rng))
        throw ConfigError("field: modulus is not prime");

    mpz_class pm1 = p_ - 1;
    unsigned long adic = mpz_scan1(pm1.get_mpz_t(), 0);
    if (adic != params.two_adicity)
        throw ConfigError("field: stated two_adicity does not match p-1");
    if (params.hash_exponent < 2)
        throw ConfigError("field: hash_exponent must be >= 2");
    mpz_class g;
    mpz_gcd_ui(g.get_mpz_t(), pm1.get_mpz_t(), params.hash_exponent);
    if (g != 1) throw ConfigError("field: gcd(hash_exponent, p-1) != 1");

    mod_ = limbs_from_mpz(p_);

    // n0inv = -p^{-1} mod 2^64 via Newton iteration on the low limb
    u64 inv = 1;
    for (int i = 0; i < 6; ++i) inv *= 2 - mod_[0] * inv;
    n0inv_ = ~inv + 1;

    mpz_class r = (mpz_class(1) << 256) % p_;
    mpz_class r2 = (r * r) % p_;
    r2_ = limbs_from_mpz(r2);
    one_.limbs = limbs_from_mpz(r);

    // Deterministic 2^a-subgroup generator: first small x whose
    // (p-1)/2^a power has exact order 2^a.
    mpz_class odd_part = pm1 >> params.two_adicity;
    for (u64 x = 2;; ++x) {
        Fe cand = pow(from_u64(x), odd_part);
        if (params.two_adicity == 0) { two_adic_root_ = one_; break; }
        Fe probe = cand;
        for (unsigned i = 0; i + 1 < params.two_adicity; ++i) probe = sqr(probe);
        if (probe != one_ && !is_zero(probe)) { // probe must be -1
            two_adic_root_ = cand;
            break;
        }
    }
}

void Field::require_production_invariants() const {
    if (bits_ <= 192) throw ConfigError("field: production modulus must exceed 2^192");
    if (params_.two_adicity < 20)
        throw ConfigError("field: production two_adicity must be >= 20");
}

Fe Field::from_mpz(const mpz_class& x) const {
    mpz_class v = x % p_;
    if (v < 0) v += p_;
    Fe out;
    out.limbs = mont_mul(limbs_from_mpz(v), r2_);
    return out;
}

Fe Field::from_u64(std::uint64_t x) const {
    Fe out;
    Limbs l{x, 0, 0, 0};
    if (geq(l, mod_)) return from_mpz(mpz_class(mpz_from_limbs(l)));
    out.limbs = mont_mul(l, r2_);
    return out;
}

Fe Field::from_i64(std::int64_t x) const {
    if (x >= 0) return from_u64(static_cast<u64>(x));
    return neg(from_u64(static_cast<u64>(-(x + 1)) + 1));
}

mpz_class Field::to_mpz(const Fe& a) const {
    Limbs one_limb{1, 0, 0, 0};
    return mpz_from_limbs(mont_mul(a.limbs, one_limb));
}

mpz_class Field::signed_lift(const Fe& a) const {
    mpz_class v = to_mpz(a);
    if (2 * v > p_) v -= p_;
    return v;
}

Fe Field::inv(const Fe& a) const {
    if (is_zero(a)) throw std::domain_error("field: inverse of zero");
    mpz_class v = to_mpz(a), out;
    if (mpz_invert(out.get_mpz_t(), v.get_mpz_t(), p_.get_mpz_t()) == 0)
        throw std::domain_error("field: not invertible");
    return from_mpz(out);
}

Fe Field::pow(const Fe& a, const mpz_class& e) const {
    if (e < 0) return inv(pow(a, mpz_class(-e)));
    Fe result = one_;
    Fe base = a;
    size_t nbits = mpz_sizeinbase(e.get_mpz_t(), 2);
    if (e == 0) return one_;
    for (size_t i = 0; i < nbits; ++i) {
        if (mpz_tstbit(e.get_mpz_t(), i)) result = mul(result, base);
        if (i + 1 < nbits) base = sqr(base);
    }
    return result;
}

Fe Field::pow_u64(const Fe& a, std::uint64_t e) const {
    Fe result = one_;
    Fe base = a;
    while (e != 0) {
        if (e & 1) result = mul(result, base);
        base = sqr(base);
        e >>= 1;
    }
    return result;
}

void Field::batch_inv(std::span<Fe> xs) const {
    if (xs.empty()) return;
    std::vector<Fe> prefix(xs.size());
    Fe acc = one_;
    for (size_t i = 0; i < xs.size(); ++i) {
        prefix[i] = acc;
        if (is_zero(xs[i])) throw std::domain_error("batch_inv: zero element");
        acc = mul(acc, xs[i]);
    }
    Fe inv_acc = inv(acc);
    for (size_t i = xs.size(); i-- > 0;) {
        Fe orig = xs[i];
        xs[i] = mul(inv_acc, prefix[i]);
        inv_acc = mul(inv_acc, orig);
    }
}

Fe Field::sample(Rng& rng) const {
    unsigned words = (bits_ + 63) / 64;
    u64 top_mask = (bits_ % 64) ? ((1ULL << (bits_ % 64)) - 1) : ~0ULL;
    for (;;) {
        Limbs l{};
        for (unsigned i = 0; i < words; ++i) l[i] = rng.next_u64();
        l[words - 1] &= top_mask;
        if (!geq(l, mod_)) {
            Fe out;
            out.limbs = mont_mul(l, r2_);
            return out;
        }
    }
}

Fe Field::root_of_unity(unsigned log2_order) const {
    if (log2_order > params_.two_adicity)
        throw std::invalid_argument("field: order exceeds two-adicity");
    Fe w = two_adic_root_;
    for (unsigned i = log2_order; i < params_.two_adicity; ++i) w = sqr(w);
    return w;
}

std::array<std::uint8_t, 32> Field::to_bytes(const Fe& a) const {
    std::array<std::uint8_t, 32> out{};
    mpz_class v = to_mpz(a);
    size_t count = 0;
    std::array<std::uint8_t, 32> tmp{};
    mpz_export(tmp.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
    // right-align into big-endian 32 bytes
    for (size_t i = 0; i < count; ++i) out[32 - count + i] = tmp[i];
    return out;
}

Fe Field::from_bytes(std::span<const std::uint8_t> b) const {
    if (b.size() != 32) throw FormatError("field element: expected 32 bytes");
    mpz_class v;
    mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
    if (v >= p_) throw FormatError("field element: value not canonical");
    return from_mpz(v);
}

} // namespace bpfl
