// include/latgen/io.hpp: JSON loading for lattices and sublattices.
//
//   {"n": 2, "basis": [["1", "0"], ["1/2", "3"]], "column_major": true}
//
// Entries are integers, "p/q" strings or exact decimal strings. With
// column_major (the default) each inner list is one basis vector.

#pragma once

#include "latgen/exactmat.hpp"
#include "latgen/lattice.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace latgen {

inline Rational rational_from_json(const nlohmann::json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(Integer(v.get<long>()));
    throw std::invalid_argument("lattice entries must be integers or strings");
}

// Vectors of a JSON list of lists, checked against dimension n.
inline std::vector<RatVector> vectors_from_json(const nlohmann::json& list, std::size_t n) {
    std::vector<RatVector> out;
    for (const auto& row : list) {
        if (row.size() != n) throw std::invalid_argument("vector length does not match n");
        RatVector v;
        for (const auto& x : row) v.push_back(rational_from_json(x));
        out.push_back(std::move(v));
    }
    return out;
}

inline RationalMatrix basis_from_json(const nlohmann::json& j) {
    const auto n = j.at("n").get<std::size_t>();
    const bool column_major = j.value("column_major", true);
    const auto lists = vectors_from_json(j.at("basis"), n);
    if (lists.size() != n) throw std::invalid_argument("basis must have n entries");
    RationalMatrix M(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (column_major) M(b, a) = lists[a][b];
            else M(a, b) = lists[a][b];
        }
    return M;
}

inline LatticeBasis lattice_from_json(const nlohmann::json& j) { return LatticeBasis(basis_from_json(j)); }

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return nlohmann::json::parse(in);
}

} // namespace latgen
