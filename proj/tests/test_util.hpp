#ifndef PKINV_TESTS_TEST_UTIL_HPP
#define PKINV_TESTS_TEST_UTIL_HPP

// Independent reference implementations used as oracles by the test suites.
// These deliberately share no code path with the library algorithms they
// check.

#include <functional>
#include <vector>

#include "pkinv/rng.hpp"
#include "pkinv/structure.hpp"

namespace testutil {

using pkinv::Arc;
using pkinv::Structure;

// Largest mutually crossing subset, by explicit subset enumeration.
inline int brute_force_crossing_number(const Structure& s) {
    const auto& arcs = s.arcs();
    const int m = static_cast<int>(arcs.size());
    int best = 0;
    for (uint32_t mask = 1; mask < (1u << m); ++mask) {
        std::vector<int> sel;
        for (int h = 0; h < m; ++h)
            if (mask & (1u << h)) sel.push_back(h);
        bool ok = true;
        for (size_t a = 0; a < sel.size() && ok; ++a)
            for (size_t b = a + 1; b < sel.size() && ok; ++b)
                if (!pkinv::arcs_cross(arcs[sel[a]], arcs[sel[b]])) ok = false;
        if (ok) best = std::max(best, static_cast<int>(sel.size()));
    }
    return best;
}

// Two-page assignment by trying every bipartition of the arcs.
inline bool brute_force_planar(const Structure& s) {
    const auto& arcs = s.arcs();
    const int m = static_cast<int>(arcs.size());
    for (uint32_t mask = 0; mask < (1u << m); ++mask) {
        bool ok = true;
        for (int a = 0; a < m && ok; ++a)
            for (int b = a + 1; b < m && ok; ++b) {
                bool same_page = ((mask >> a) & 1u) == ((mask >> b) & 1u);
                if (same_page && pkinv::arcs_cross(arcs[a], arcs[b])) ok = false;
            }
        if (ok) return true;
    }
    return m == 0;
}

// Every degree-<=1 diagram over [n] without arcs (i, i+1), by choosing a
// partner (or none) for the first uncovered position.
inline void for_each_diagram(int n, const std::function<void(const Structure&)>& visit) {
    std::vector<Arc> arcs;
    std::vector<bool> used(static_cast<size_t>(n) + 1, false);
    std::function<void(int)> rec = [&](int i) {
        while (i <= n && used[i]) ++i;
        if (i > n) {
            visit(Structure(n, arcs));
            return;
        }
        used[i] = true;
        rec(i + 1);  // leave i unpaired
        for (int j = i + 2; j <= n; ++j) {
            if (used[j]) continue;
            used[j] = true;
            arcs.push_back(Arc{i, j});
            rec(i + 1);
            arcs.pop_back();
            used[j] = false;
        }
        used[i] = false;
    };
    rec(1);
}

inline void for_each_k_noncrossing(int n, int k,
                                   const std::function<void(const Structure&)>& visit) {
    for_each_diagram(n, [&](const Structure& s) {
        if (brute_force_crossing_number(s) <= k - 1) visit(s);
    });
}

// Seeded random degree-<=1 diagram with arc length >= min_len and crossing
// number <= k-1 (by rejection per arc).
inline Structure random_structure(int n, int max_arcs, int min_len, int k, pkinv::Rng& rng) {
    std::vector<Arc> arcs;
    std::vector<bool> used(static_cast<size_t>(n) + 1, false);
    int attempts = 8 * max_arcs;
    while (static_cast<int>(arcs.size()) < max_arcs && attempts-- > 0) {
        int i = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(n)));
        int j = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(n)));
        if (i > j) std::swap(i, j);
        if (j - i < min_len || used[i] || used[j]) continue;
        arcs.push_back(Arc{i, j});
        Structure candidate(n, arcs);
        if (pkinv::crossing_number(candidate) > k - 1) {
            arcs.pop_back();
            continue;
        }
        used[i] = used[j] = true;
    }
    return Structure(n, arcs);
}

}  // namespace testutil

#endif  // PKINV_TESTS_TEST_UTIL_HPP
