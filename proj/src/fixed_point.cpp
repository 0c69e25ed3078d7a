#include "bpfl/fixed_point.hpp"

#include <cmath>
#include <stdexcept>

#include "bpfl/errors.hpp"

namespace bpfl {

std::int64_t FixedPointCodec::max_magnitude() const {
    return static_cast<std::int64_t>(std::trunc(static_cast<double>(scale) * weight_bound));
}

unsigned sum_bits_for(const Field& field, const FixedPointCodec& codec, std::size_t dim) {
    if (dim == 0) throw ConfigError("sum_bits_for: dimension must be >= 1");
    mpz_class k(static_cast<unsigned long>(codec.scale));
    mpz_class kw(static_cast<long>(codec.max_magnitude()));
    mpz_class d(static_cast<unsigned long>(dim));
    mpz_class euclid = d * (2 * kw) * (2 * kw);
    mpz_class cosine = k * k * d * kw * kw;
    cosine = cosine * cosine;
    mpz_class bound = euclid > cosine ? euclid : cosine;
    unsigned b = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2));
    if ((mpz_class(1) << b) * 2 >= field.modulus())
        throw ConfigError("sum_bits_for: 2^B must stay below p/2 for this field");
    return b;
}

FixedPointCodec make_codec(const Field& field, std::size_t dim, std::uint64_t scale,
                           double weight_bound) {
    if (scale == 0 || (scale & (scale - 1)) != 0)
        throw ConfigError("codec: scale must be a power of two");
    if (weight_bound <= 0) throw ConfigError("codec: weight_bound must be positive");
    FixedPointCodec codec{scale, weight_bound, 0};
    codec.sum_bits = sum_bits_for(field, codec, dim);
    return codec;
}

Fe encode(const Field& field, const FixedPointCodec& codec, double x) {
    if (!std::isfinite(x) || std::fabs(x) > codec.weight_bound)
        throw std::out_of_range("encode: |x| exceeds the weight bound");
    double scaled = std::trunc(static_cast<double>(codec.scale) * x);
    auto mag = static_cast<std::int64_t>(std::fabs(scaled));
    if (x < 0) return field.neg(field.from_u64(static_cast<std::uint64_t>(mag)));
    return field.from_u64(static_cast<std::uint64_t>(mag));
}

double decode(const Field& field, const FixedPointCodec& codec, const Fe& v) {
    mpz_class lift = field.signed_lift(v);
    unsigned b = codec.sum_bits ? codec.sum_bits : 63;
    mpz_class bound = mpz_class(1) << b;
    if (lift > bound || lift < -bound)
        throw std::out_of_range("decode: value is not a valid fixed-point encoding");
    return lift.get_d() / static_cast<double>(codec.scale);
}

std::vector<Fe> encode_vector(const Field& field, const FixedPointCodec& codec,
                              std::span<const double> xs) {
    std::vector<Fe> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(encode(field, codec, x));
    return out;
}

std::vector<double> decode_vector(const Field& field, const FixedPointCodec& codec,
                                  std::span<const Fe> vs) {
    std::vector<double> out;
    out.reserve(vs.size());
    for (const Fe& v : vs) out.push_back(decode(field, codec, v));
    return out;
}

mpz_class threshold_squared(const FixedPointCodec& codec, double tau) {
    if (!std::isfinite(tau) || tau < 0)
        throw std::out_of_range("threshold_squared: tau must be >= 0");
    double kt = static_cast<double>(codec.scale) * tau;
    double sq = std::floor(kt * kt);
    mpz_class out;
    // doubles lose integer precision past 2^53; route through text to be exact
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.0f", sq);
    out = mpz_class(buf);
    return out;
}

} // namespace bpfl
