#pragma once

#include <json.hpp>

#include "cnotdihedral/channel.hpp"
#include "cnotdihedral/group.hpp"

// JSON schemas. Every document carries a "schema" field so downstream
// consumers can detect format changes.
//
//   matrix:  {"schema":"cnotdihedral/gf2-matrix/v1","rows":[[0,1],...]}
//   poly:    {"n":..,"k":..,"terms":[{"mask":..,"coeff":..},...]} masks increasing
//   element: {"schema":"cnotdihedral/element/v1","n":..,"k":..,
//             "poly":{...},"linear":[[..]],"shift":[..]}
//   pauli channel: {"schema":"cnotdihedral/pauli-channel/v1","n":..,
//             "eta":[{"x":..,"z":..,"p":..},...]}
//   liouville: {"schema":"cnotdihedral/liouville/v1","n":..,"matrix":[[..]]}

namespace cnotdihedral {

using nlohmann::json;

inline json to_json(const GF2Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.n; ++i) {
        json row = json::array();
        for (int j = 0; j < m.n; ++j) row.push_back(m.get(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline GF2Matrix gf2_matrix_from_json(const json& j) {
    std::vector<std::vector<int>> rows = j.get<std::vector<std::vector<int>>>();
    for (const auto& r : rows)
        for (int v : r)
            if (v != 0 && v != 1) throw std::invalid_argument("matrix entries must be 0/1");
    return GF2Matrix::from_rows(rows);
}

inline json to_json(const GF2Vector& v) {
    json out = json::array();
    for (int j = 0; j < v.n; ++j) out.push_back(v.get(j));
    return out;
}

inline GF2Vector gf2_vector_from_json(const json& j) {
    auto bits = j.get<std::vector<int>>();
    GF2Vector v(int(bits.size()));
    for (size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0 && bits[i] != 1)
            throw std::invalid_argument("vector entries must be 0/1");
        v.set(int(i), bits[i]);
    }
    return v;
}

inline json to_json(const PhasePolynomial& p) {
    json terms = json::array();
    for (const auto& [mask, coeff] : p.coeffs)  // std::map: masks increasing
        terms.push_back({{"mask", mask}, {"coeff", coeff}});
    return {{"n", p.n}, {"k", p.k}, {"terms", terms}};
}

inline PhasePolynomial phase_polynomial_from_json(const json& j) {
    PhasePolynomial p(j.at("n").get<int>(), j.at("k").get<int>());
    uint64_t prev_mask = 0;
    bool first = true;
    for (const auto& term : j.at("terms")) {
        uint64_t mask = term.at("mask").get<uint64_t>();
        uint32_t coeff = term.at("coeff").get<uint32_t>();
        if (!first && mask <= prev_mask)
            throw std::invalid_argument("polynomial masks must be strictly increasing");
        if (mask == 0) throw std::invalid_argument("constant term not allowed");
        if (coeff == 0 || coeff >= p.modulus())
            throw std::invalid_argument("coefficient out of range");
        p.accumulate(mask, coeff);
        prev_mask = mask;
        first = false;
    }
    if (!w_divisibility_ok(p))
        throw std::invalid_argument("polynomial violates divisibility constraints");
    return p;
}

inline json to_json(const CNOTDihedralElement& g) {
    return {{"schema", "cnotdihedral/element/v1"},
            {"n", g.poly.n},
            {"k", g.poly.k},
            {"poly", to_json(g.poly)},
            {"linear", to_json(g.linear)},
            {"shift", to_json(g.shift)}};
}

inline CNOTDihedralElement element_from_json(const json& j) {
    CNOTDihedralElement g;
    g.poly = phase_polynomial_from_json(j.at("poly"));
    g.linear = gf2_matrix_from_json(j.at("linear"));
    g.shift = gf2_vector_from_json(j.at("shift"));
    if (j.contains("n") && j.at("n").get<int>() != g.poly.n)
        throw std::invalid_argument("n field inconsistent with poly");
    if (j.contains("k") && j.at("k").get<int>() != g.poly.k)
        throw std::invalid_argument("k field inconsistent with poly");
    if (!element_valid(g)) throw std::invalid_argument("invalid group element");
    return g;
}

inline json to_json(const PauliChannel& ch) {
    json eta = json::array();
    for (uint64_t idx = 0; idx < ch.eta.size(); ++idx) {
        if (ch.eta[idx] == 0.0) continue;
        PauliString p = PauliString::from_index(ch.n, idx);
        eta.push_back({{"x", p.x}, {"z", p.z}, {"p", ch.eta[idx]}});
    }
    return {{"schema", "cnotdihedral/pauli-channel/v1"}, {"n", ch.n}, {"eta", eta}};
}

inline PauliChannel pauli_channel_from_json(const json& j) {
    PauliChannel ch(j.at("n").get<int>());
    std::fill(ch.eta.begin(), ch.eta.end(), 0.0);
    for (const auto& term : j.at("eta")) {
        PauliString p(ch.n, term.at("x").get<uint64_t>(), term.at("z").get<uint64_t>());
        ch.eta[p.index()] += term.at("p").get<double>();
    }
    if (!ch.valid(1e-9)) throw std::invalid_argument("Pauli probabilities must sum to 1");
    return ch;
}

inline json to_json(const LiouvilleRep& rep) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < rep.r.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < rep.r.cols(); ++j) row.push_back(rep.r(i, j));
        rows.push_back(row);
    }
    return {{"schema", "cnotdihedral/liouville/v1"}, {"n", rep.n}, {"matrix", rows}};
}

inline LiouvilleRep liouville_from_json(const json& j) {
    LiouvilleRep rep(j.at("n").get<int>());
    auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
    if (rows.size() != pauli_count(rep.n))
        throw std::invalid_argument("Liouville matrix has wrong size");
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size())
            throw std::invalid_argument("Liouville matrix not square");
        for (size_t c = 0; c < rows[i].size(); ++c) rep.r(i, c) = rows[i][c];
    }
    return rep;
}

}  // namespace cnotdihedral
