#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cnotdihedral/group.hpp"

// Circuit representation over the generators CNOT(i,j), X(j) and
// PHASE(j,a) = (Z_{2^k})^a on qubit j. Gate indices are 0-based in memory
// and 1-based in the text format. The leftmost gate in the list acts first.

namespace cnotdihedral {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what), line(line_) {}
};

struct Gate {
    enum class Kind { CNOT, X, Phase };
    Kind kind = Kind::X;
    int control = -1;       // CNOT only
    int target = 0;
    uint32_t power = 0;     // Phase only, in [0, 2^k)

    static Gate cnot(int control, int target) { return {Kind::CNOT, control, target, 0}; }
    static Gate x(int target) { return {Kind::X, -1, target, 0}; }
    static Gate phase(int target, uint32_t power) { return {Kind::Phase, -1, target, power}; }

    friend bool operator==(const Gate&, const Gate&) = default;
};

struct Circuit {
    int n = 1;
    int k = 1;
    std::vector<Gate> gates;

    GroupParams params() const { return GroupParams(n, k); }
    friend bool operator==(const Circuit&, const Circuit&) = default;
};

inline void check_gate(const Gate& g, const GroupParams& params) {
    auto in_range = [&](int q) { return q >= 0 && q < params.n; };
    switch (g.kind) {
        case Gate::Kind::CNOT:
            if (!in_range(g.control) || !in_range(g.target) || g.control == g.target)
                throw DimensionError("invalid CNOT indices");
            break;
        case Gate::Kind::X:
            if (!in_range(g.target)) throw DimensionError("invalid X target");
            break;
        case Gate::Kind::Phase:
            if (!in_range(g.target)) throw DimensionError("invalid PHASE target");
            if (g.power >= (uint32_t(1) << params.k))
                throw DimensionError("PHASE power out of range");
            break;
    }
}

inline CNOTDihedralElement gate_element(const Gate& g, GroupParams params) {
    check_gate(g, params);
    CNOTDihedralElement e = identity(params);
    switch (g.kind) {
        case Gate::Kind::CNOT:
            // b_target <- b_control xor b_target: add row `control` into row `target`.
            e.linear.rows[g.target] ^= e.linear.rows[g.control];
            break;
        case Gate::Kind::X:
            e.shift.flip(g.target);
            break;
        case Gate::Kind::Phase:
            e.poly.accumulate(uint64_t(1) << g.target, g.power);
            break;
    }
    return e;
}

inline CNOTDihedralElement evaluate_circuit(const Circuit& circ) {
    GroupParams params = circ.params();
    CNOTDihedralElement acc = identity(params);
    for (const Gate& g : circ.gates) acc = multiply(gate_element(g, params), acc);
    return acc;
}

// pi_{J,j} Z^a pi_{J,j}^dagger: 2(|J|-1) CNOTs around one PHASE on j.
// Evaluates to the diagonal element with polynomial a * p_J.
inline Circuit monomial_gadget(uint64_t j_mask, int j, uint32_t a, GroupParams params) {
    if (j_mask == 0 || !((j_mask >> j) & 1)) throw DimensionError("gadget needs j in J");
    Circuit c{params.n, params.k, {}};
    std::vector<int> others;
    for (uint64_t w = j_mask & ~(uint64_t(1) << j); w; w &= w - 1)
        others.push_back(__builtin_ctzll(w));
    for (int q : others) c.gates.push_back(Gate::cnot(q, j));
    c.gates.push_back(Gate::phase(j, a & ((uint32_t(1) << params.k) - 1)));
    for (auto it = others.rbegin(); it != others.rend(); ++it)
        c.gates.push_back(Gate::cnot(*it, j));
    return c;
}

// Synthesizes a circuit evaluating exactly to g, ordered as diagonal part,
// then CNOT network, then X layer. The phase part is emitted round by round
// from degree k down to 1; within a round monomials are processed in
// canonical mask order and j is the largest index of the support.
inline Circuit synthesize(const CNOTDihedralElement& g) {
    GroupParams params = g.params();
    int k = params.k;
    Circuit out{params.n, params.k, {}};

    PhasePolynomial q = g.poly;
    for (int t = std::min(k, params.n); t >= 1; --t) {
        // Snapshot the degree-t terms; the residual update only touches
        // lower degrees.
        std::vector<std::pair<uint64_t, uint32_t>> terms;
        for (const auto& [mask, v] : q.coeffs)
            if (__builtin_popcountll(mask) == t) terms.push_back({mask, v});
        for (const auto& [mask, v] : terms) {
            // Lift: a * (-2)^{t-1} = v mod 2^k with the smallest a >= 0.
            uint32_t u = (v >> (t - 1)) & ((uint32_t(1) << (k - t + 1)) - 1);
            if ((t - 1) % 2 == 1) u = (0u - u) & ((uint32_t(1) << (k - t + 1)) - 1);
            int j = 63 - __builtin_clzll(mask);
            Circuit gadget = monomial_gadget(mask, j, u, params);
            out.gates.insert(out.gates.end(), gadget.gates.begin(), gadget.gates.end());
            q = add(q, negate(scale(monomial_basis_poly(params.n, k, mask), u)));
        }
    }
    if (!q.is_zero()) throw std::logic_error("phase synthesis residual nonzero");

    for (const RowOp& op : row_reduce_transcript(g.linear))
        out.gates.push_back(Gate::cnot(op.src, op.dst));
    for (int j = 0; j < params.n; ++j)
        if (g.shift.get(j)) out.gates.push_back(Gate::x(j));
    return out;
}

inline Circuit circuit_inverse(const Circuit& circ) {
    Circuit inv{circ.n, circ.k, {}};
    uint32_t mod = uint32_t(1) << circ.k;
    for (auto it = circ.gates.rbegin(); it != circ.gates.rend(); ++it) {
        Gate g = *it;
        if (g.kind == Gate::Kind::Phase) g.power = (mod - g.power) & (mod - 1);
        inv.gates.push_back(g);
    }
    return inv;
}

// Text format: header "#cnotdihedral n=<n> k=<k>", then one gate per line:
//   cx <control> <target>
//   x <target>
//   zp <power> <target>
// Indices are 1-based. When `named` is set and k = 3, phase powers
// 1,7,2,6,4 export as t,tdg,s,sdg,z.
inline std::string export_text(const Circuit& circ, bool named = false) {
    std::ostringstream out;
    out << "#cnotdihedral n=" << circ.n << " k=" << circ.k << "\n";
    for (const Gate& g : circ.gates) {
        switch (g.kind) {
            case Gate::Kind::CNOT:
                out << "cx " << g.control + 1 << " " << g.target + 1 << "\n";
                break;
            case Gate::Kind::X:
                out << "x " << g.target + 1 << "\n";
                break;
            case Gate::Kind::Phase: {
                const char* name = nullptr;
                if (named && circ.k == 3) {
                    switch (g.power) {
                        case 1: name = "t"; break;
                        case 7: name = "tdg"; break;
                        case 2: name = "s"; break;
                        case 6: name = "sdg"; break;
                        case 4: name = "z"; break;
                    }
                }
                if (name) out << name << " " << g.target + 1 << "\n";
                else out << "zp " << g.power << " " << g.target + 1 << "\n";
                break;
            }
        }
    }
    return out.str();
}

inline Circuit parse_text(std::istream& in) {
    std::string line;
    int lineno = 0;
    Circuit circ;
    bool have_header = false;

    auto next_token = [](std::istringstream& ss, int lineno, const char* what) {
        std::string tok;
        if (!(ss >> tok)) throw ParseError(lineno, std::string("expected ") + what);
        return tok;
    };
    auto to_int = [](const std::string& s, int lineno, const char* what) {
        try {
            size_t pos = 0;
            long v = std::stol(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ParseError(lineno, std::string("bad ") + what + " '" + s + "'");
        }
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string op;
        if (!(ss >> op)) continue;  // blank line
        if (op[0] == '#') {
            if (op == "#cnotdihedral") {
                std::string field;
                while (ss >> field) {
                    if (field.rfind("n=", 0) == 0)
                        circ.n = int(to_int(field.substr(2), lineno, "n"));
                    else if (field.rfind("k=", 0) == 0)
                        circ.k = int(to_int(field.substr(2), lineno, "k"));
                    else
                        throw ParseError(lineno, "unknown header field '" + field + "'");
                }
                try {
                    check_dimension(circ.n);
                    check_precision(circ.k);
                } catch (const DimensionError& e) {
                    throw ParseError(lineno, e.what());
                }
                have_header = true;
            }
            continue;  // other comments ignored
        }
        if (!have_header) throw ParseError(lineno, "missing #cnotdihedral header");
        GroupParams params = circ.params();
        uint32_t mod = uint32_t(1) << circ.k;
        try {
            if (op == "cx") {
                int c = int(to_int(next_token(ss, lineno, "control"), lineno, "control")) - 1;
                int t = int(to_int(next_token(ss, lineno, "target"), lineno, "target")) - 1;
                circ.gates.push_back(Gate::cnot(c, t));
            } else if (op == "x") {
                int t = int(to_int(next_token(ss, lineno, "target"), lineno, "target")) - 1;
                circ.gates.push_back(Gate::x(t));
            } else if (op == "zp") {
                long p = to_int(next_token(ss, lineno, "power"), lineno, "power");
                int t = int(to_int(next_token(ss, lineno, "target"), lineno, "target")) - 1;
                if (p < 0) throw ParseError(lineno, "negative phase power");
                circ.gates.push_back(Gate::phase(t, uint32_t(p) & (mod - 1)));
                if (uint32_t(p) >= mod) throw ParseError(lineno, "phase power out of range");
            } else if (op == "t" || op == "tdg" || op == "s" || op == "sdg" || op == "z") {
                if (circ.k != 3) throw ParseError(lineno, "named gate requires k=3");
                uint32_t p = op == "t" ? 1 : op == "tdg" ? 7 : op == "s" ? 2
                           : op == "sdg" ? 6 : 4;
                int t = int(to_int(next_token(ss, lineno, "target"), lineno, "target")) - 1;
                circ.gates.push_back(Gate::phase(t, p));
            } else {
                throw ParseError(lineno, "unknown gate '" + op + "'");
            }
            check_gate(circ.gates.back(), params);
            std::string extra;
            if (ss >> extra) throw ParseError(lineno, "trailing token '" + extra + "'");
        } catch (const DimensionError& e) {
            throw ParseError(lineno, e.what());
        }
    }
    if (!have_header) throw ParseError(lineno, "missing #cnotdihedral header");
    return circ;
}

inline Circuit parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_text(in);
}

}  // namespace cnotdihedral
