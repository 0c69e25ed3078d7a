#include "bpfl/paillier.hpp"

#include <stdexcept>

#include "bpfl/errors.hpp"
#include "bpfl/numeric.hpp"

namespace bpfl {

namespace {

constexpr unsigned kMillerRabinRounds = 40;

std::uint64_t tag_of(const mpz_class& n) {
    // FNV over the limbs; collision here only mislabels an error message
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < mpz_size(n.get_mpz_t()); ++i) {
        h ^= mpz_getlimbn(n.get_mpz_t(), i);
        h *= 0x100000001b3ULL;
    }
    return h;
}

void check_key(const PaillierPublicKey& pk, const PaillierCiphertext& c) {
    if (pk.key_tag != c.key_tag)
        throw std::invalid_argument("paillier: ciphertext from a different key");
}

} // namespace

PaillierKeypair paillier_keygen(unsigned kappa_bits, Rng& rng) {
    if (kappa_bits < 512 || kappa_bits % 2 != 0)
        throw ConfigError("paillier: kappa must be even and >= 512 bits");

    mpz_class q1, q2, n, lambda;
    for (;;) {
        q1 = random_prime(kappa_bits / 2, kMillerRabinRounds, rng);
        do {
            q2 = random_prime(kappa_bits / 2, kMillerRabinRounds, rng);
        } while (q2 == q1);
        n = q1 * q2;
        mpz_class q1m = q1 - 1, q2m = q2 - 1;
        mpz_lcm(lambda.get_mpz_t(), q1m.get_mpz_t(), q2m.get_mpz_t());
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), lambda.get_mpz_t());
        if (g == 1 && mpz_sizeinbase(n.get_mpz_t(), 2) == kappa_bits) break;
    }

    PaillierKeypair kp;
    kp.pk.n = n;
    kp.pk.n2 = n * n;
    kp.pk.g = n + 1;
    kp.pk.key_tag = tag_of(n);
    kp.sk.lambda = lambda;
    if (mpz_invert(kp.sk.mu.get_mpz_t(), lambda.get_mpz_t(), n.get_mpz_t()) == 0)
        throw ProtocolError("paillier: lambda not invertible mod N");
    return kp;
}

PaillierCiphertext paillier_encrypt(const PaillierPublicKey& pk, const mpz_class& m, Rng& rng) {
    if (m < 0 || m >= pk.n) throw std::out_of_range("paillier: plaintext outside [0, N)");
    mpz_class rho;
    do {
        rho = rng.mpz_below(pk.n);
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), rho.get_mpz_t(), pk.n.get_mpz_t());
        if (rho != 0 && g == 1) break;
    } while (true);

    // g = N+1 gives g^m = 1 + mN mod N^2
    mpz_class gm = (1 + m * pk.n) % pk.n2;
    mpz_class rn;
    mpz_powm(rn.get_mpz_t(), rho.get_mpz_t(), pk.n.get_mpz_t(), pk.n2.get_mpz_t());
    PaillierCiphertext c;
    c.value = (gm * rn) % pk.n2;
    c.key_tag = pk.key_tag;
    return c;
}

mpz_class paillier_decrypt(const PaillierPublicKey& pk, const PaillierSecretKey& sk,
                           const PaillierCiphertext& c) {
    check_key(pk, c);
    mpz_class u;
    mpz_powm(u.get_mpz_t(), c.value.get_mpz_t(), sk.lambda.get_mpz_t(), pk.n2.get_mpz_t());
    mpz_class l = (u - 1) / pk.n;
    return (l * sk.mu) % pk.n;
}

PaillierCiphertext paillier_add(const PaillierPublicKey& pk, const PaillierCiphertext& c1,
                                const PaillierCiphertext& c2) {
    check_key(pk, c1);
    check_key(pk, c2);
    PaillierCiphertext out;
    out.value = (c1.value * c2.value) % pk.n2;
    out.key_tag = pk.key_tag;
    return out;
}

PaillierCiphertext paillier_scalar_mul(const PaillierPublicKey& pk, const PaillierCiphertext& c,
                                       const mpz_class& l) {
    check_key(pk, c);
    if (l < 0) throw std::out_of_range("paillier: scalar must be >= 0");
    PaillierCiphertext out;
    mpz_powm(out.value.get_mpz_t(), c.value.get_mpz_t(), l.get_mpz_t(), pk.n2.get_mpz_t());
    out.key_tag = pk.key_tag;
    return out;
}

} // namespace bpfl
