#include "bpfl/numeric.hpp"

#include <stdexcept>

namespace bpfl {

namespace {
const unsigned kSmallPrimes[] = {
    3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149,
    151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227};
}

bool is_probable_prime(const mpz_class& n, unsigned rounds, Rng& rng) {
    if (n < 2) return false;
    if (n == 2 || n == 3) return true;
    if (mpz_even_p(n.get_mpz_t())) return false;
    for (unsigned p : kSmallPrimes) {
        if (n == p) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }

    // n - 1 = d * 2^s with d odd
    mpz_class d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    d >>= s;

    mpz_class x, base;
    for (unsigned round = 0; round < rounds; ++round) {
        base = 2 + rng.mpz_below(n - 4);
        mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned long i = 0; i + 1 < s; ++i) {
            x = (x * x) % n;
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

mpz_class random_prime(unsigned bits, unsigned mr_rounds, Rng& rng) {
    if (bits < 8) throw std::invalid_argument("random_prime: need >= 8 bits");
    for (;;) {
        mpz_class cand = rng.mpz_bits(bits);
        // force width (top two bits) and oddness
        mpz_setbit(cand.get_mpz_t(), bits - 1);
        mpz_setbit(cand.get_mpz_t(), bits - 2);
        mpz_setbit(cand.get_mpz_t(), 0);
        if (is_probable_prime(cand, mr_rounds, rng)) return cand;
    }
}

} // namespace bpfl
