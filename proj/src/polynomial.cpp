#include "bpfl/polynomial.hpp"

#include <stdexcept>

namespace bpfl {

Polynomial poly_from(const Field& f, std::vector<Fe> coeffs) {
    while (!coeffs.empty() && f.is_zero(coeffs.back())) coeffs.pop_back();
    return Polynomial{std::move(coeffs)};
}

Polynomial poly_add(const Field& f, const Polynomial& a, const Polynomial& b) {
    std::vector<Fe> out(std::max(a.coeffs.size(), b.coeffs.size()), f.zero());
    for (size_t i = 0; i < a.coeffs.size(); ++i) out[i] = a.coeffs[i];
    for (size_t i = 0; i < b.coeffs.size(); ++i) out[i] = f.add(out[i], b.coeffs[i]);
    return poly_from(f, std::move(out));
}

Polynomial poly_sub(const Field& f, const Polynomial& a, const Polynomial& b) {
    std::vector<Fe> out(std::max(a.coeffs.size(), b.coeffs.size()), f.zero());
    for (size_t i = 0; i < a.coeffs.size(); ++i) out[i] = a.coeffs[i];
    for (size_t i = 0; i < b.coeffs.size(); ++i) out[i] = f.sub(out[i], b.coeffs[i]);
    return poly_from(f, std::move(out));
}

Polynomial poly_mul(const Field& f, const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial{};
    std::vector<Fe> out(a.coeffs.size() + b.coeffs.size() - 1, f.zero());
    for (size_t i = 0; i < a.coeffs.size(); ++i) {
        for (size_t j = 0; j < b.coeffs.size(); ++j) {
            out[i + j] = f.add(out[i + j], f.mul(a.coeffs[i], b.coeffs[j]));
        }
    }
    return poly_from(f, std::move(out));
}

Fe poly_eval(const Field& f, const Polynomial& a, const Fe& z) {
    Fe acc = f.zero();
    for (size_t i = a.coeffs.size(); i-- > 0;) acc = f.add(f.mul(acc, z), a.coeffs[i]);
    return acc;
}

std::pair<Polynomial, Polynomial> poly_divide(const Field& f, const Polynomial& num,
                                              const Polynomial& den) {
    if (den.is_zero()) throw std::domain_error("poly_divide: zero divisor");
    if (num.coeffs.size() < den.coeffs.size()) return {Polynomial{}, num};

    std::vector<Fe> rem = num.coeffs;
    std::vector<Fe> quot(num.coeffs.size() - den.coeffs.size() + 1, f.zero());
    Fe lead_inv = f.inv(den.coeffs.back());
    for (size_t i = quot.size(); i-- > 0;) {
        Fe coef = f.mul(rem[i + den.coeffs.size() - 1], lead_inv);
        quot[i] = coef;
        if (f.is_zero(coef)) continue;
        for (size_t j = 0; j < den.coeffs.size(); ++j) {
            rem[i + j] = f.sub(rem[i + j], f.mul(coef, den.coeffs[j]));
        }
    }
    return {poly_from(f, std::move(quot)), poly_from(f, std::move(rem))};
}

EvaluationDomain::EvaluationDomain(const Field& f, std::size_t size) : f_(&f), size_(size) {
    if (size == 0 || (size & (size - 1)) != 0)
        throw std::invalid_argument("domain size must be a power of two");
    log2_size_ = 0;
    while ((std::size_t{1} << log2_size_) < size) ++log2_size_;
    omega_ = f.root_of_unity(log2_size_); // throws if two-adicity is too small
    omega_inv_ = f.inv(omega_);
    size_inv_ = f.inv(f.from_u64(size));
    // Any element outside the subgroup works as a coset shift.
    for (std::uint64_t g = 2;; ++g) {
        Fe cand = f.from_u64(g);
        if (f.pow_u64(cand, size_) != f.one()) {
            shift_ = cand;
            break;
        }
    }
    shift_inv_ = f.inv(shift_);
    fwd_twiddles_.assign(size_ / 2 ? size_ / 2 : 1, f.one());
    inv_twiddles_.assign(size_ / 2 ? size_ / 2 : 1, f.one());
    for (size_t i = 1; i < size_ / 2; ++i) {
        fwd_twiddles_[i] = f.mul(fwd_twiddles_[i - 1], omega_);
        inv_twiddles_[i] = f.mul(inv_twiddles_[i - 1], omega_inv_);
    }
}

Fe EvaluationDomain::element(std::size_t i) const { return f_->pow_u64(omega_, i); }

void EvaluationDomain::fft_core(std::vector<Fe>& a, const std::vector<Fe>& twiddles) const {
    const Field& f = *f_;
    const size_t n = size_;
    if (a.size() != n) throw std::invalid_argument("fft: size mismatch");
    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        size_t stride = n / len;
        for (size_t start = 0; start < n; start += len) {
            for (size_t k = 0; k < len / 2; ++k) {
                Fe u = a[start + k];
                Fe v = f.mul(a[start + k + len / 2], twiddles[k * stride]);
                a[start + k] = f.add(u, v);
                a[start + k + len / 2] = f.sub(u, v);
            }
        }
    }
}

void EvaluationDomain::fft(std::vector<Fe>& a) const { fft_core(a, fwd_twiddles_); }

void EvaluationDomain::ifft(std::vector<Fe>& a) const {
    fft_core(a, inv_twiddles_);
    for (Fe& x : a) x = f_->mul(x, size_inv_);
}

void EvaluationDomain::coset_fft(std::vector<Fe>& a) const {
    Fe power = f_->one();
    for (Fe& x : a) {
        x = f_->mul(x, power);
        power = f_->mul(power, shift_);
    }
    fft(a);
}

void EvaluationDomain::coset_ifft(std::vector<Fe>& a) const {
    ifft(a);
    Fe power = f_->one();
    for (Fe& x : a) {
        x = f_->mul(x, power);
        power = f_->mul(power, shift_inv_);
    }
}

Fe EvaluationDomain::vanishing_at(const Fe& z) const {
    return f_->sub(f_->pow_u64(z, size_), f_->one());
}

std::vector<Fe> EvaluationDomain::lagrange_coeffs_at(const Fe& z) const {
    const Field& f = *f_;
    const size_t n = size_;
    std::vector<Fe> out(n, f.zero());
    Fe vanish = vanishing_at(z);
    if (f.is_zero(vanish)) {
        // z is a domain element: indicator vector
        Fe cur = f.one();
        for (size_t i = 0; i < n; ++i) {
            if (cur == z) {
                out[i] = f.one();
                return out;
            }
            cur = f.mul(cur, omega_);
        }
        throw std::logic_error("lagrange_coeffs_at: vanishing but not in domain");
    }
    // L_i(z) = (z^n - 1) * w^i / (n * (z - w^i))
    std::vector<Fe> denom(n);
    Fe cur = f.one();
    for (size_t i = 0; i < n; ++i) {
        denom[i] = f.sub(z, cur);
        cur = f.mul(cur, omega_);
    }
    f.batch_inv(denom);
    Fe scale = f.mul(vanish, size_inv_);
    cur = f.one();
    for (size_t i = 0; i < n; ++i) {
        out[i] = f.mul(f.mul(scale, cur), denom[i]);
        cur = f.mul(cur, omega_);
    }
    return out;
}

} // namespace bpfl
