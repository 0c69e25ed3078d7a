#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpfl/field.hpp"

namespace bpfl {

using VarIndex = std::uint32_t;

/// Variable handle. Index 0 is the constant one; 1..io_len are the public
/// inputs; everything above is auxiliary witness.
struct Var {
    VarIndex index = 0;
};

struct Term {
    VarIndex index;
    Fe coeff;
};

/// Sparse linear combination over the assignment vector z = (1, io, aux).
struct LinComb {
    std::vector<Term> terms;

    LinComb() = default;
    LinComb(Var v, Fe coeff) { terms.push_back({v.index, coeff}); }

    LinComb& add(Var v, Fe coeff) {
        terms.push_back({v.index, coeff});
        return *this;
    }
    LinComb& add_constant(Fe c) {
        terms.push_back({0, c});
        return *this;
    }
};

struct Constraint {
    LinComb a, b, c; ///< row satisfied iff <a,z> * <b,z> = <c,z>
};

struct R1CS {
    std::size_t num_vars = 1; ///< includes the constant-one variable
    std::size_t io_len = 0;
    std::vector<Constraint> rows;
};

struct Witness {
    std::vector<Fe> io;  ///< length io_len
    std::vector<Fe> aux; ///< length num_vars - io_len - 1
};

/// z = (1, io, aux). Throws std::invalid_argument on shape mismatch.
std::vector<Fe> full_assignment(const Field& f, const R1CS& cs, const Witness& w);

Fe eval_lincomb(const Field& f, const LinComb& lc, const std::vector<Fe>& z);

/// True iff (Az) o (Bz) = (Cz) row-wise.
bool check_satisfied(const Field& f, const R1CS& cs, const Witness& w);

/// Line-oriented debug/diff export: one constraint per line, sparse
/// index:coefficient pairs in decimal.
std::string r1cs_to_text(const Field& f, const R1CS& cs);

/// Single-pass circuit synthesizer. Build mode allocates layout and emits
/// constraints; assign mode re-runs the same gadget code against a fixed
/// R1CS, filling values (out-of-range inputs yield an unsatisfying witness,
/// never a silently repaired one).
class CircuitBuilder {
public:
    static CircuitBuilder build_mode(const Field& f);
    static CircuitBuilder assign_mode(const Field& f, const R1CS& shape);

    bool assigning() const { return assigning_; }
    const Field& field() const { return *f_; }

    Var public_input(std::optional<Fe> value);
    Var aux(std::optional<Fe> value);

    void enforce(const LinComb& a, const LinComb& b, const LinComb& c);

    /// Allocates product aux var with constraint a*b = out.
    Var mul(const LinComb& a, const LinComb& b);

    /// Value of a linear combination (assign mode only).
    Fe eval(const LinComb& lc) const;

    R1CS take_r1cs();
    Witness take_witness() const;

    std::size_t num_constraints() const { return cs_.rows.size(); }

private:
    explicit CircuitBuilder(const Field& f) : f_(&f) {}

    const Field* f_;
    R1CS cs_;
    bool assigning_ = false;
    bool aux_started_ = false;
    std::size_t expected_vars_ = 0;
    std::vector<Fe> values_; ///< indexed by variable, assign mode
};

/// Booleanity + recomposition gadget: asserts the value of `v` has a lift in
/// [0, 2^bits). Returns the allocated bit variables (LSB first).
std::vector<Var> range_check_gadget(CircuitBuilder& cb, const LinComb& v, unsigned bits);

} // namespace bpfl
