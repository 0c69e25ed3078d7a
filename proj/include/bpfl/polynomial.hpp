#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bpfl/field.hpp"

namespace bpfl {

/// Dense polynomial, coefficients ascending by degree, normalized so the
/// trailing coefficient is nonzero (the zero polynomial has no coefficients).
struct Polynomial {
    std::vector<Fe> coeffs;

    bool is_zero() const { return coeffs.empty(); }
    /// Degree of a nonzero polynomial; the zero polynomial reports 0.
    std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

Polynomial poly_from(const Field& f, std::vector<Fe> coeffs); // normalizes
Polynomial poly_add(const Field& f, const Polynomial& a, const Polynomial& b);
Polynomial poly_sub(const Field& f, const Polynomial& a, const Polynomial& b);
Polynomial poly_mul(const Field& f, const Polynomial& a, const Polynomial& b);
Fe poly_eval(const Field& f, const Polynomial& a, const Fe& z);

/// Euclidean division: num = q*den + rem with deg(rem) < deg(den).
/// Throws std::domain_error on a zero divisor.
std::pair<Polynomial, Polynomial> poly_divide(const Field& f, const Polynomial& num,
                                              const Polynomial& den);

/// Radix-2 multiplicative subgroup domain {w^0, ..., w^(n-1)} with FFT-based
/// evaluation and interpolation, plus a multiplicative coset for division by
/// the vanishing polynomial z^n - 1.
class EvaluationDomain {
public:
    EvaluationDomain(const Field& f, std::size_t size); // size must be a power of two

    std::size_t size() const { return size_; }
    Fe generator() const { return omega_; }
    Fe element(std::size_t i) const;
    Fe coset_shift() const { return shift_; }

    /// coefficients -> evaluations over the domain (in place, length == size)
    void fft(std::vector<Fe>& a) const;
    /// evaluations -> coefficients
    void ifft(std::vector<Fe>& a) const;
    /// coefficients -> evaluations over the shifted coset g*H
    void coset_fft(std::vector<Fe>& a) const;
    /// evaluations over g*H -> coefficients
    void coset_ifft(std::vector<Fe>& a) const;

    /// z^n - 1
    Fe vanishing_at(const Fe& z) const;
    /// All Lagrange basis values L_i(z), O(n); exact also for z inside the domain.
    std::vector<Fe> lagrange_coeffs_at(const Fe& z) const;

private:
    void fft_core(std::vector<Fe>& a, const std::vector<Fe>& twiddles) const;

    const Field* f_;
    std::size_t size_;
    unsigned log2_size_;
    Fe omega_, omega_inv_, size_inv_, shift_, shift_inv_;
    std::vector<Fe> fwd_twiddles_, inv_twiddles_;
};

} // namespace bpfl
