#include "bpfl/qap.hpp"

#include "bpfl/errors.hpp"

namespace bpfl {

namespace {
std::size_t domain_size_for(std::size_t rows) {
    std::size_t n = 1;
    while (n < rows) n <<= 1;
    return n;
}
} // namespace

QAP::QAP(const Field& field, std::shared_ptr<const R1CS> cs)
    : f_(&field), cs_(std::move(cs)), domain_(field, domain_size_for(cs_->rows.size())) {}

QAP r1cs_to_qap(const Field& field, std::shared_ptr<const R1CS> cs) {
    std::size_t n = domain_size_for(cs->rows.size());
    unsigned log2 = 0;
    while ((std::size_t{1} << log2) < n) ++log2;
    if (log2 > field.two_adicity())
        throw ConfigError("r1cs_to_qap: constraint count exceeds the field's 2-adic domain");
    return QAP(field, std::move(cs));
}

QAP::ColumnEvals QAP::columns_at(const Fe& z) const {
    const Field& f = *f_;
    std::vector<Fe> lag = domain_.lagrange_coeffs_at(z);
    ColumnEvals out;
    out.u.assign(cs_->num_vars, f.zero());
    out.w.assign(cs_->num_vars, f.zero());
    out.y.assign(cs_->num_vars, f.zero());
    for (std::size_t i = 0; i < cs_->rows.size(); ++i) {
        const Constraint& row = cs_->rows[i];
        const Fe& li = lag[i];
        if (f.is_zero(li)) continue;
        for (const Term& t : row.a.terms) out.u[t.index] = f.add(out.u[t.index], f.mul(t.coeff, li));
        for (const Term& t : row.b.terms) out.w[t.index] = f.add(out.w[t.index], f.mul(t.coeff, li));
        for (const Term& t : row.c.terms) out.y[t.index] = f.add(out.y[t.index], f.mul(t.coeff, li));
    }
    return out;
}

Polynomial QAP::column_poly(int which, std::size_t k) const {
    const Field& f = *f_;
    std::vector<Fe> evals(domain_.size(), f.zero());
    for (std::size_t i = 0; i < cs_->rows.size(); ++i) {
        const LinComb& lc = which == 0   ? cs_->rows[i].a
                            : which == 1 ? cs_->rows[i].b
                                         : cs_->rows[i].c;
        for (const Term& t : lc.terms) {
            if (t.index == k) evals[i] = f.add(evals[i], t.coeff);
        }
    }
    domain_.ifft(evals);
    return poly_from(f, std::move(evals));
}

Polynomial QAP::u_poly(std::size_t k) const { return column_poly(0, k); }
Polynomial QAP::w_poly(std::size_t k) const { return column_poly(1, k); }
Polynomial QAP::y_poly(std::size_t k) const { return column_poly(2, k); }

Polynomial QAP::target_poly() const {
    const Field& f = *f_;
    std::vector<Fe> coeffs(domain_.size() + 1, f.zero());
    coeffs[0] = f.neg(f.one());
    coeffs[domain_.size()] = f.one();
    return poly_from(f, std::move(coeffs));
}

void QAP::row_values(const std::vector<Fe>& assignment, std::vector<Fe>& az, std::vector<Fe>& bz,
                     std::vector<Fe>& cz) const {
    const Field& f = *f_;
    if (assignment.size() != cs_->num_vars)
        throw std::invalid_argument("qap: assignment length mismatch");
    az.assign(domain_.size(), f.zero());
    bz.assign(domain_.size(), f.zero());
    cz.assign(domain_.size(), f.zero());
    for (std::size_t i = 0; i < cs_->rows.size(); ++i) {
        az[i] = eval_lincomb(f, cs_->rows[i].a, assignment);
        bz[i] = eval_lincomb(f, cs_->rows[i].b, assignment);
        cz[i] = eval_lincomb(f, cs_->rows[i].c, assignment);
    }
}

Polynomial QAP::p_poly(const std::vector<Fe>& assignment) const {
    const Field& f = *f_;
    std::vector<Fe> az, bz, cz;
    row_values(assignment, az, bz, cz);
    domain_.ifft(az);
    domain_.ifft(bz);
    domain_.ifft(cz);
    Polynomial pa = poly_from(f, std::move(az));
    Polynomial pb = poly_from(f, std::move(bz));
    Polynomial pc = poly_from(f, std::move(cz));
    return poly_sub(f, poly_mul(f, pa, pb), pc);
}

std::vector<Fe> QAP::h_coefficients(const std::vector<Fe>& assignment) const {
    const Field& f = *f_;
    std::vector<Fe> az, bz, cz;
    row_values(assignment, az, bz, cz);
    domain_.ifft(az);
    domain_.ifft(bz);
    domain_.ifft(cz);
    domain_.coset_fft(az);
    domain_.coset_fft(bz);
    domain_.coset_fft(cz);
    // t is constant on the coset: t(g w^i) = g^n - 1
    Fe t_inv = f.inv(f.sub(f.pow_u64(domain_.coset_shift(), domain_.size()), f.one()));
    std::vector<Fe> h(domain_.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        h[i] = f.mul(f.sub(f.mul(az[i], bz[i]), cz[i]), t_inv);
    }
    domain_.coset_ifft(h);
    return h;
}

} // namespace bpfl
