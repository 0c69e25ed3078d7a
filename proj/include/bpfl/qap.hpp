#pragma once

#include <memory>

#include "bpfl/polynomial.hpp"
#include "bpfl/r1cs.hpp"

namespace bpfl {

/// Quadratic arithmetic program for an R1CS: column polynomials u_k/w_k/y_k
/// interpolate the columns of A/B/C over a radix-2 domain H, and the target
/// polynomial is t(z) = z^n - 1 (n = |H| >= number of constraints). The
/// instance is satisfiable iff t divides p = (sum c_k u_k)(sum c_k w_k) -
/// (sum c_k y_k).
class QAP {
public:
    QAP(const Field& field, std::shared_ptr<const R1CS> cs);

    const R1CS& r1cs() const { return *cs_; }
    const EvaluationDomain& domain() const { return domain_; }
    std::size_t num_vars() const { return cs_->num_vars; }
    std::size_t io_len() const { return cs_->io_len; }

    Fe target_at(const Fe& z) const { return domain_.vanishing_at(z); }

    struct ColumnEvals {
        std::vector<Fe> u, w, y; ///< indexed by variable (0 = constant one)
    };
    /// All column polynomials evaluated at one point, O(n + nnz).
    ColumnEvals columns_at(const Fe& z) const;

    /// Coefficient forms, O(n log n) each; intended for small circuits/tests.
    Polynomial u_poly(std::size_t k) const;
    Polynomial w_poly(std::size_t k) const;
    Polynomial y_poly(std::size_t k) const;
    Polynomial target_poly() const;
    /// p(z) for a full assignment (z vector = (1, io, aux)); test-scale.
    Polynomial p_poly(const std::vector<Fe>& assignment) const;

    /// Quotient coefficients h = p / t computed in evaluation form over a
    /// coset, O(n log n). Exact (and of degree <= n-2) iff the assignment
    /// satisfies the R1CS; otherwise the returned vector is the evaluation-
    /// form pseudo-quotient whose proof will fail verification.
    std::vector<Fe> h_coefficients(const std::vector<Fe>& assignment) const;

    /// Row-value vectors (Az, Bz, Cz) padded to domain size.
    void row_values(const std::vector<Fe>& assignment, std::vector<Fe>& az, std::vector<Fe>& bz,
                    std::vector<Fe>& cz) const;

private:
    Polynomial column_poly(int which, std::size_t k) const;

    const Field* f_;
    std::shared_ptr<const R1CS> cs_;
    EvaluationDomain domain_;
};

/// Throws ConfigError when the constraint count exceeds the field's 2-adic
/// domain capacity.
QAP r1cs_to_qap(const Field& field, std::shared_ptr<const R1CS> cs);

} // namespace bpfl
