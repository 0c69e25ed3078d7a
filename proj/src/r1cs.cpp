#include "bpfl/r1cs.hpp"

#include <sstream>
#include <stdexcept>

namespace bpfl {

std::vector<Fe> full_assignment(const Field& f, const R1CS& cs, const Witness& w) {
    if (w.io.size() != cs.io_len || w.aux.size() != cs.num_vars - cs.io_len - 1)
        throw std::invalid_argument("witness shape does not match the constraint system");
    std::vector<Fe> z;
    z.reserve(cs.num_vars);
    z.push_back(f.one());
    z.insert(z.end(), w.io.begin(), w.io.end());
    z.insert(z.end(), w.aux.begin(), w.aux.end());
    return z;
}

Fe eval_lincomb(const Field& f, const LinComb& lc, const std::vector<Fe>& z) {
    Fe acc = f.zero();
    for (const Term& t : lc.terms) acc = f.add(acc, f.mul(t.coeff, z[t.index]));
    return acc;
}

bool check_satisfied(const Field& f, const R1CS& cs, const Witness& w) {
    std::vector<Fe> z = full_assignment(f, cs, w);
    for (const Constraint& row : cs.rows) {
        Fe a = eval_lincomb(f, row.a, z);
        Fe b = eval_lincomb(f, row.b, z);
        Fe c = eval_lincomb(f, row.c, z);
        if (f.mul(a, b) != c) return false;
    }
    return true;
}

namespace {
void write_lincomb(std::ostringstream& os, const Field& f, const LinComb& lc) {
    bool first = true;
    for (const Term& t : lc.terms) {
        if (!first) os << ' ';
        first = false;
        os << t.index << ':' << f.to_mpz(t.coeff).get_str();
    }
}
} // namespace

std::string r1cs_to_text(const Field& f, const R1CS& cs) {
    std::ostringstream os;
    os << "p " << f.modulus().get_str() << '\n';
    os << "vars " << cs.num_vars << " io " << cs.io_len << " rows " << cs.rows.size() << '\n';
    for (const Constraint& row : cs.rows) {
        os << "A ";
        write_lincomb(os, f, row.a);
        os << " | B ";
        write_lincomb(os, f, row.b);
        os << " | C ";
        write_lincomb(os, f, row.c);
        os << '\n';
    }
    return os.str();
}

CircuitBuilder CircuitBuilder::build_mode(const Field& f) { return CircuitBuilder(f); }

CircuitBuilder CircuitBuilder::assign_mode(const Field& f, const R1CS& shape) {
    CircuitBuilder cb(f);
    cb.assigning_ = true;
    cb.expected_vars_ = shape.num_vars;
    cb.cs_.io_len = 0;
    cb.values_.reserve(shape.num_vars);
    cb.values_.push_back(f.one());
    cb.cs_.num_vars = 1;
    return cb;
}

Var CircuitBuilder::public_input(std::optional<Fe> value) {
    if (aux_started_) throw std::logic_error("public inputs must precede aux variables");
    Var v{static_cast<VarIndex>(cs_.num_vars++)};
    cs_.io_len++;
    if (assigning_) {
        if (!value) throw std::logic_error("assign mode requires a value");
        values_.push_back(*value);
    }
    return v;
}

Var CircuitBuilder::aux(std::optional<Fe> value) {
    aux_started_ = true;
    Var v{static_cast<VarIndex>(cs_.num_vars++)};
    if (assigning_) {
        if (!value) throw std::logic_error("assign mode requires a value");
        values_.push_back(*value);
    }
    return v;
}

void CircuitBuilder::enforce(const LinComb& a, const LinComb& b, const LinComb& c) {
    if (assigning_) return; // shape is fixed; assignment only fills values
    cs_.rows.push_back(Constraint{a, b, c});
}

Var CircuitBuilder::mul(const LinComb& a, const LinComb& b) {
    std::optional<Fe> value;
    if (assigning_) value = f_->mul(eval(a), eval(b));
    Var out = aux(value);
    enforce(a, b, LinComb(out, f_->one()));
    return out;
}

Fe CircuitBuilder::eval(const LinComb& lc) const {
    if (!assigning_) throw std::logic_error("eval is only available in assign mode");
    return eval_lincomb(*f_, lc, values_);
}

R1CS CircuitBuilder::take_r1cs() {
    if (assigning_) throw std::logic_error("assign mode holds no constraint system");
    return std::move(cs_);
}

Witness CircuitBuilder::take_witness() const {
    if (!assigning_) throw std::logic_error("build mode holds no witness");
    if (expected_vars_ != values_.size())
        throw std::logic_error("assignment allocated a different variable count");
    Witness w;
    w.io.assign(values_.begin() + 1, values_.begin() + 1 + cs_.io_len);
    w.aux.assign(values_.begin() + 1 + cs_.io_len, values_.end());
    return w;
}

std::vector<Var> range_check_gadget(CircuitBuilder& cb, const LinComb& v, unsigned bits) {
    const Field& f = cb.field();
    mpz_class lift;
    if (cb.assigning()) {
        lift = f.to_mpz(cb.eval(v));
        // out-of-range values keep only their low bits; the recomposition
        // row then fails, which is the intended rejection path
    }
    std::vector<Var> bit_vars;
    bit_vars.reserve(bits);
    LinComb recompose;
    Fe weight = f.one();
    Fe two = f.from_u64(2);
    for (unsigned i = 0; i < bits; ++i) {
        std::optional<Fe> bit_value;
        if (cb.assigning())
            bit_value = mpz_tstbit(lift.get_mpz_t(), i) ? f.one() : f.zero();
        Var bit = cb.aux(bit_value);
        // b * (b - 1) = 0
        LinComb b_minus_one(bit, f.one());
        b_minus_one.add_constant(f.neg(f.one()));
        cb.enforce(LinComb(bit, f.one()), b_minus_one, LinComb{});
        recompose.add(bit, weight);
        weight = f.mul(weight, two);
        bit_vars.push_back(bit);
    }
    // sum(b_i * 2^i) = v
    cb.enforce(recompose, LinComb{Var{0}, f.one()}, v);
    return bit_vars;
}

} // namespace bpfl
