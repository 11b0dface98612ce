#ifndef PKINV_ENERGY_HPP
#define PKINV_ENERGY_HPP

#include <array>
#include <fstream>
#include <sstream>
#include <string>

#include "pkinv/loops.hpp"
#include "pkinv/structure.hpp"

namespace pkinv {

// Toy loop-free energy model: stabilizing scores for stacked adjacent base
// pairs, a per-nucleotide penalty for unpaired positions and a penalty per
// pseudoknot loop.  Defaults score an adjacency by its weaker pair:
// G-C/C-G -3.0, A-U/U-A -2.0, G-U/U-G -1.0.
struct EnergyModel {
    // indexed by pair_index(): AU, UA, GC, CG, GU, UG
    std::array<double, 6> pair_strength{-2.0, -2.0, -3.0, -3.0, -1.0, -1.0};
    std::array<std::array<double, 6>, 6> stack_scores{};
    double unpaired_penalty = 0.0;
    double pseudoknot_penalty = 2.0;

    EnergyModel() { rebuild_stack_scores(); }

    void rebuild_stack_scores() {
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b)
                stack_scores[a][b] = std::max(pair_strength[a], pair_strength[b]);
    }
};

inline std::string pair_name(int idx) {
    return std::string(1, kAllowedPairs[idx][0]) + kAllowedPairs[idx][1];
}

inline int pair_name_index(const std::string& name) {
    if (name.size() != 2) return -1;
    return pair_index(name[0], name[1]);
}

// Plain key-value text: blank lines and '#' comments ignored.
//   strength <pair> <value>         e.g. strength GC -3.0
//   stack <pair> <pair> <value>     one adjacency override
//   unpaired_penalty <value>
//   pseudoknot_penalty <value>
inline EnergyModel load_energy_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open energy file: " + path);
    EnergyModel model;
    std::vector<std::tuple<int, int, double>> overrides;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key) || key[0] == '#') continue;
        auto fail = [&](const std::string& why) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + why);
        };
        if (key == "strength") {
            std::string p;
            double v;
            if (!(ss >> p >> v)) fail("expected: strength <pair> <value>");
            int idx = pair_name_index(p);
            if (idx < 0) fail("unknown pair '" + p + "'");
            model.pair_strength[idx] = v;
        } else if (key == "stack") {
            std::string p, q;
            double v;
            if (!(ss >> p >> q >> v)) fail("expected: stack <pair> <pair> <value>");
            int pi = pair_name_index(p), qi = pair_name_index(q);
            if (pi < 0 || qi < 0) fail("unknown pair");
            overrides.emplace_back(pi, qi, v);
        } else if (key == "unpaired_penalty") {
            if (!(ss >> model.unpaired_penalty)) fail("expected a value");
        } else if (key == "pseudoknot_penalty") {
            if (!(ss >> model.pseudoknot_penalty)) fail("expected a value");
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    model.rebuild_stack_scores();
    for (auto [p, q, v] : overrides) model.stack_scores[p][q] = v;
    return model;
}

inline int count_pseudoknot_loops(const Structure& s) {
    int c = 0;
    for (const Loop& loop : decompose_loops(s).loops)
        if (loop.kind == LoopKind::Pseudoknot) ++c;
    return c;
}

// Sum of stack adjacency scores + unpaired penalty + pseudoknot penalty.
inline double energy(const Sequence& seq, const Structure& s, const EnergyModel& model) {
    if (!is_compatible(seq, s))
        throw IncompatibleSequence("energy: sequence incompatible with structure");
    double e = 0.0;
    for (const StackRun& r : stacks(s)) {
        for (int t = 0; t + 1 < r.size; ++t) {
            Arc outer = r.arc_at(t), inner = r.arc_at(t + 1);
            int p = pair_index(seq[outer.i - 1], seq[outer.j - 1]);
            int q = pair_index(seq[inner.i - 1], seq[inner.j - 1]);
            e += model.stack_scores[p][q];
        }
    }
    int unpaired = s.n() - 2 * static_cast<int>(s.arcs().size());
    e += model.unpaired_penalty * unpaired;
    e += model.pseudoknot_penalty * count_pseudoknot_loops(s);
    return e;
}

}  // namespace pkinv

#endif  // PKINV_ENERGY_HPP
