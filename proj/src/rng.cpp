#include "bpfl/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bpfl {

namespace {
std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace

Rng Rng::child(std::uint64_t tag) const {
    std::uint64_t s = state_ ^ (0xd1342543de82ef95ULL * (tag + 1));
    // burn one step so child(0) does not coincide with the parent stream
    splitmix64(s);
    return Rng(s);
}

std::uint64_t Rng::next_u64() {
    return splitmix64(state_);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
    // rejection from the top multiple of bound
    std::uint64_t limit = bound * ((~0ULL) / bound);
    for (;;) {
        std::uint64_t v = next_u64();
        if (v < limit || limit == 0) return v % bound;
    }
}

double Rng::unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal(double mean, double stddev) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + stddev * spare_normal_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = unit();
    double u2 = unit();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_normal_ = mag * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return mean + stddev * mag * std::cos(2.0 * M_PI * u2);
}

mpz_class Rng::mpz_bits(unsigned bits) {
    mpz_class out = 0;
    unsigned produced = 0;
    while (produced < bits) {
        std::uint64_t chunk = next_u64();
        unsigned take = bits - produced >= 64 ? 64 : bits - produced;
        if (take < 64) chunk &= (1ULL << take) - 1;
        mpz_class part(0);
        mpz_import(part.get_mpz_t(), 1, 1, sizeof(chunk), 0, 0, &chunk);
        out |= part << produced;
        produced += take;
    }
    return out;
}

mpz_class Rng::mpz_below(const mpz_class& bound) {
    if (bound <= 0) throw std::invalid_argument("Rng::mpz_below: nonpositive bound");
    unsigned bits = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2));
    for (;;) {
        mpz_class v = mpz_bits(bits);
        if (v < bound) return v;
    }
}

} // namespace bpfl
