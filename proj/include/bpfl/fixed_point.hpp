#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bpfl/field.hpp"

namespace bpfl {

/// Signed fixed-point embedding of reals into the field: x -> trunc(k*x),
/// negatives as p - |trunc(k*x)|.
struct FixedPointCodec {
    std::uint64_t scale = 1ULL << 16; ///< k, a power of two
    double weight_bound = 8.0;        ///< W_max: encodable |x| <= W_max
    unsigned sum_bits = 0;            ///< B: width valid for every circuit intermediate

    std::int64_t max_magnitude() const; ///< trunc(k * W_max)
};

/// B such that all Euclidean/cosine intermediates at dimension `dim` fit in
/// [0, 2^B); throws ConfigError if 2^B >= p/2 (the signed lift would be
/// ambiguous).
unsigned sum_bits_for(const Field& field, const FixedPointCodec& codec, std::size_t dim);

/// Codec with sum_bits derived for `dim`.
FixedPointCodec make_codec(const Field& field, std::size_t dim,
                           std::uint64_t scale = 1ULL << 16, double weight_bound = 8.0);

/// Throws std::out_of_range if |x| > W_max.
Fe encode(const Field& field, const FixedPointCodec& codec, double x);
/// Throws std::out_of_range if the signed lift falls outside [-2^B, 2^B].
double decode(const Field& field, const FixedPointCodec& codec, const Fe& v);

std::vector<Fe> encode_vector(const Field& field, const FixedPointCodec& codec,
                              std::span<const double> xs);
std::vector<double> decode_vector(const Field& field, const FixedPointCodec& codec,
                                  std::span<const Fe> vs);

/// Integer encoding of a threshold as floor((k * tau)^2), the form published
/// in the per-round proof parameters.
mpz_class threshold_squared(const FixedPointCodec& codec, double tau);

} // namespace bpfl
