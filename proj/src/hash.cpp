#include "bpfl/hash.hpp"

#include "bpfl/errors.hpp"

namespace bpfl {

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

AlgebraicHashParams make_hash_params(const Field& field, unsigned rounds,
                                     const std::string& constants_seed) {
    if (rounds == 0) throw ConfigError("hash: need at least one round");
    AlgebraicHashParams params;
    params.rounds = rounds;
    params.exponent = field.hash_exponent();
    params.constants_seed = constants_seed;
    params.round_constants.reserve(rounds);
    Rng stream(fnv1a64(constants_seed));
    for (unsigned t = 0; t < rounds; ++t) {
        // rejection-sample a canonical residue from the keyed stream
        params.round_constants.push_back(field.sample(stream));
    }
    return params;
}

Fe hash_permutation(const Field& field, const AlgebraicHashParams& params, Fe y) {
    for (unsigned t = 0; t < params.rounds; ++t) {
        Fe base = field.add(y, params.round_constants[t]);
        y = field.pow_u64(base, params.exponent);
    }
    return y;
}

Fe algebraic_hash(const Field& field, const AlgebraicHashParams& params,
                  std::span<const Fe> elements) {
    Fe state = field.zero();
    for (const Fe& x : elements) {
        state = hash_permutation(field, params, field.add(state, x));
    }
    return state;
}

} // namespace bpfl
