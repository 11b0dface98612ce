#ifndef PKINV_ORACLE_HPP
#define PKINV_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "pkinv/energy.hpp"
#include "pkinv/loops.hpp"
#include "pkinv/structure.hpp"

namespace pkinv {

inline int base_index(char c) {
    switch (c) {
        case 'A': return 0;
        case 'C': return 1;
        case 'G': return 2;
        case 'U': return 3;
    }
    return -1;
}

// pair class of (x, y) by base indices, -1 if not pairable
inline const int8_t kPairClass[4][4] = {
    //          A   C   G   U
    /* A */ {-1, -1, -1, 0},
    /* C */ {-1, -1, 3, -1},
    /* G */ {-1, 2, -1, 4},
    /* U */ {1, -1, 5, -1},
};

struct FoldEntry {
    Structure structure;
    double energy_value = 0.0;
};

// Energy-ordered list of candidate structures for a sequence; entries[0] is
// the mfe structure.  Ties are broken by lexicographic order on arc lists.
struct FoldRanking {
    Sequence query;
    std::vector<FoldEntry> entries;

    const Structure& mfe() const { return entries.front().structure; }
};

class FoldingOracle {
public:
    virtual ~FoldingOracle() = default;
    virtual FoldRanking fold(const Sequence& seq, int n_best = 1) const = 0;
    virtual int length_cap() const = 0;
    virtual const EnergyModel& model() const = 0;
};

// ---------------------------------------------------------------------------
// Exhaustive enumeration
// ---------------------------------------------------------------------------

// Visits every structure over [n] with crossing number <= k-1, minimum arc
// length >= lambda and minimum stack size >= sigma, exactly once, in a
// deterministic order.  Structures are assembled stack by stack, placed in
// increasing order of the outer start point.
inline void enumerate_structures(int n, int k, int sigma, int lambda, int cap,
                                 const std::function<void(const Structure&)>& visit) {
    if (n > cap)
        throw CapExceeded("enumeration length " + std::to_string(n) + " exceeds cap " +
                          std::to_string(cap));
    const int min_len = std::max(lambda, 2);  // no (i, i+1) arcs
    std::vector<Arc> arcs;
    std::vector<int> partner(static_cast<size_t>(n) + 1, 0);

    // would adding arc c create k mutually crossing arcs?
    assert(k == 2 || k == 3);
    auto creates_k_crossing = [&](const Arc& c) {
        if (static_cast<int>(arcs.size()) < k - 1) return false;
        std::vector<const Arc*> crossers;
        for (const Arc& a : arcs)
            if (arcs_cross(a, c)) crossers.push_back(&a);
        if (k == 2) return !crossers.empty();
        for (size_t h = 0; h < crossers.size(); ++h)
            for (size_t t = h + 1; t < crossers.size(); ++t)
                if (arcs_cross(*crossers[h], *crossers[t])) return true;
        return false;
    };

    std::function<void(int)> place = [&](int from) {
        visit(Structure(n, arcs));
        for (int i = from; i + min_len + 2 * sigma - 2 <= n; ++i) {
            if (partner[i] != 0) continue;
            for (int j = i + min_len + 2 * (sigma - 1); j <= n; ++j) {
                if (partner[j] != 0) continue;
                // merging with an enclosing stack would break maximality
                if (i > 1 && j < n && partner[i - 1] == j + 1) continue;
                const int max_size = (j - i - min_len) / 2 + 1;
                bool blocked = false;
                for (int t = 0; t < sigma && !blocked; ++t)
                    blocked = partner[i + t] != 0 || partner[j - t] != 0 ||
                              creates_k_crossing(Arc{i + t, j - t});
                if (blocked) continue;
                size_t base = arcs.size();
                for (int t = 0; t < sigma; ++t) {
                    Arc a{i + t, j - t};
                    arcs.push_back(a);
                    partner[a.i] = a.j;
                    partner[a.j] = a.i;
                }
                for (int size = sigma; size <= max_size; ++size) {
                    if (size > sigma) {
                        Arc a{i + size - 1, j - size + 1};
                        if (partner[a.i] != 0 || partner[a.j] != 0 || creates_k_crossing(a)) break;
                        arcs.push_back(a);
                        partner[a.i] = a.j;
                        partner[a.j] = a.i;
                    }
                    place(i + 1);
                }
                while (arcs.size() > base) {
                    partner[arcs.back().i] = 0;
                    partner[arcs.back().j] = 0;
                    arcs.pop_back();
                }
            }
        }
    };
    place(1);
}

// ---------------------------------------------------------------------------
// Exhaustive oracle
// ---------------------------------------------------------------------------

// Desk-scale folding oracle: scores every enumerated structure compatible
// with the query and returns the N best.  Enumerations are cached per
// length in a flat catalog (arc endpoints and stack adjacencies packed into
// byte buffers) so a fold is one early-exit scan; the cache is guarded so a
// shared oracle is usable from several threads.
class ExhaustiveOracle final : public FoldingOracle {
public:
    explicit ExhaustiveOracle(EnergyModel model = EnergyModel(), int sigma = 3, int lambda = 4,
                              int k = 3, int cap = 36)
        : model_(std::move(model)), sigma_(sigma), lambda_(lambda), k_(k), cap_(cap) {
        if (cap_ > 255) throw std::invalid_argument("ExhaustiveOracle: cap above 255");
    }

    FoldRanking fold(const Sequence& seq, int n_best = 1) const override {
        validate_sequence(seq);
        const int n = static_cast<int>(seq.size());
        const Catalog& cat = catalog(n);
        int8_t base[256];
        for (size_t h = 0; h < seq.size(); ++h) base[h] = static_cast<int8_t>(base_index(seq[h]));

        std::vector<std::pair<double, uint32_t>> scored;
        for (size_t idx = 0; idx < cat.entries.size(); ++idx) {
            const Entry& e = cat.entries[idx];
            const uint8_t* arc = cat.arc_buf.data() + e.arc_off;
            bool ok = true;
            for (int t = 0; t < e.arc_cnt; ++t, arc += 2)
                if (kPairClass[base[arc[0] - 1]][base[arc[1] - 1]] < 0) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            double energy_value = e.base_energy;
            const uint8_t* adj = cat.adj_buf.data() + e.adj_off;
            for (int t = 0; t < e.adj_cnt; ++t, adj += 2) {
                int p = kPairClass[base[adj[0] - 1]][base[adj[1] - 1]];
                int q = kPairClass[base[adj[0]]][base[adj[1] - 2]];
                energy_value += model_.stack_scores[p][q];
            }
            scored.emplace_back(energy_value, static_cast<uint32_t>(idx));
        }
        auto less = [&](const std::pair<double, uint32_t>& x, const std::pair<double, uint32_t>& y) {
            if (x.first != y.first) return x.first < y.first;
            return cat.arc_lex_less(x.second, y.second);
        };
        size_t keep = std::min<size_t>(static_cast<size_t>(std::max(n_best, 1)), scored.size());
        std::partial_sort(scored.begin(), scored.begin() + static_cast<long>(keep), scored.end(),
                          less);
        scored.resize(keep);

        FoldRanking ranking;
        ranking.query = seq;
        for (auto& [energy_value, idx] : scored)
            ranking.entries.push_back(FoldEntry{cat.rebuild(idx, n), energy_value});
        return ranking;
    }

    int length_cap() const override { return cap_; }
    const EnergyModel& model() const override { return model_; }
    int sigma() const { return sigma_; }
    int lambda() const { return lambda_; }

    // number of enumerated structures for length n
    size_t structure_count(int n) const { return catalog(n).entries.size(); }

    // pre-build the catalog for a length (e.g. before spawning workers)
    void warm_up(int n) const { catalog(n); }

private:
    struct Entry {
        uint32_t arc_off = 0;
        uint32_t adj_off = 0;
        uint16_t arc_cnt = 0;
        uint16_t adj_cnt = 0;
        double base_energy = 0.0;  // unpaired + pseudoknot terms
    };
    struct Catalog {
        std::vector<Entry> entries;
        std::vector<uint8_t> arc_buf;  // (i, j) per arc, positions 1-based
        std::vector<uint8_t> adj_buf;  // outer (i, j) per stacked adjacency

        bool arc_lex_less(uint32_t x, uint32_t y) const {
            const Entry& a = entries[x];
            const Entry& b = entries[y];
            return std::lexicographical_compare(
                arc_buf.data() + a.arc_off, arc_buf.data() + a.arc_off + 2 * a.arc_cnt,
                arc_buf.data() + b.arc_off, arc_buf.data() + b.arc_off + 2 * b.arc_cnt);
        }
        Structure rebuild(uint32_t idx, int n) const {
            const Entry& e = entries[idx];
            std::vector<Arc> arcs(e.arc_cnt);
            const uint8_t* arc = arc_buf.data() + e.arc_off;
            for (int t = 0; t < e.arc_cnt; ++t, arc += 2) arcs[t] = Arc{arc[0], arc[1]};
            return Structure(n, std::move(arcs));
        }
    };

    const Catalog& catalog(int n) const {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = catalogs_.find(n);
        if (it != catalogs_.end()) return it->second;
        Catalog cat;
        enumerate_structures(n, k_, sigma_, lambda_, cap_, [&](const Structure& s) {
            Entry e;
            e.arc_off = static_cast<uint32_t>(cat.arc_buf.size());
            e.adj_off = static_cast<uint32_t>(cat.adj_buf.size());
            e.arc_cnt = static_cast<uint16_t>(s.arcs().size());
            for (const Arc& a : s.arcs()) {
                cat.arc_buf.push_back(static_cast<uint8_t>(a.i));
                cat.arc_buf.push_back(static_cast<uint8_t>(a.j));
            }
            int adj = 0;
            for (const StackRun& r : stacks(s))
                for (int t = 0; t + 1 < r.size; ++t, ++adj) {
                    cat.adj_buf.push_back(static_cast<uint8_t>(r.outer.i + t));
                    cat.adj_buf.push_back(static_cast<uint8_t>(r.outer.j - t));
                }
            e.adj_cnt = static_cast<uint16_t>(adj);
            int unpaired = s.n() - 2 * static_cast<int>(s.arcs().size());
            e.base_energy = model_.unpaired_penalty * unpaired +
                            model_.pseudoknot_penalty * count_pseudoknot_loops(s);
            cat.entries.push_back(e);
        });
        return catalogs_.emplace(n, std::move(cat)).first->second;
    }

    EnergyModel model_;
    int sigma_, lambda_, k_, cap_;
    mutable std::mutex mutex_;
    mutable std::map<int, Catalog> catalogs_;
};

// ---------------------------------------------------------------------------
// Nussinov-style noncrossing baseline
// ---------------------------------------------------------------------------

// Interval DP minimizing the same toy energy over 2-noncrossing,
// sigma-canonical structures with arc length >= lambda.  Helices are
// generated maximal (the region under a stack may not immediately extend
// it), so each structure is scored exactly as the exhaustive oracle does.
inline Structure nussinov_fold(const Sequence& seq, const EnergyModel& model, int sigma = 3,
                               int lambda = 4, double* energy_out = nullptr) {
    validate_sequence(seq);
    const int n = static_cast<int>(seq.size());
    if (n == 0) {
        if (energy_out) *energy_out = 0.0;
        return Structure(0, {});
    }
    const int min_len = std::max(lambda, 2);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<int8_t> base(seq.size());
    for (size_t h = 0; h < seq.size(); ++h) base[h] = static_cast<int8_t>(base_index(seq[h]));
    auto pc = [&](int i, int j) { return kPairClass[base[i - 1]][base[j - 1]]; };  // 1-based

    auto id = [&](int i, int j) { return static_cast<size_t>(i - 1) * n + (j - 1); };
    // W: best over [i, j]; Wex: likewise but i and j may not pair each other;
    // V: (i, j) is the outer arc of a maximal stack of size >= sigma
    std::vector<double> W(static_cast<size_t>(n) * n, 0.0), Wex(static_cast<size_t>(n) * n, 0.0),
        V(static_cast<size_t>(n) * n, inf);

    auto w_at = [&](const std::vector<double>& tab, int i, int j) -> double {
        return i > j ? 0.0 : tab[id(i, j)];
    };

    for (int i = 1; i <= n; ++i) W[id(i, i)] = Wex[id(i, i)] = model.unpaired_penalty;
    for (int len = 2; len <= n; ++len) {
        for (int i = 1; i + len - 1 <= n; ++i) {
            const int j = i + len - 1;
            double v = inf;
            const int max_size = (j - i - min_len) / 2 + 1;
            double stacked = 0.0;
            for (int size = 1; size <= max_size; ++size) {
                int ii = i + size - 1, jj = j - size + 1;
                if (pc(ii, jj) < 0) break;
                if (size >= 2) stacked += model.stack_scores[pc(ii - 1, jj + 1)][pc(ii, jj)];
                if (size >= sigma) v = std::min(v, stacked + w_at(Wex, ii + 1, jj - 1));
            }
            V[id(i, j)] = v;
            double wex = model.unpaired_penalty + w_at(W, i + 1, j);
            for (int m = i + min_len; m < j; ++m)
                if (V[id(i, m)] < inf) wex = std::min(wex, V[id(i, m)] + w_at(W, m + 1, j));
            Wex[id(i, j)] = wex;
            W[id(i, j)] = std::min(wex, v);
        }
    }

    // deterministic backtrack: helix branches in ascending m, then unpaired
    std::vector<Arc> arcs;
    std::function<void(int, int, int)> trace;       // mode 0 = W, 1 = Wex
    std::function<void(int, int)> trace_helix;      // expand V(i, j)
    trace = [&](int i, int j, int mode) {
        while (i <= j) {
            if (i == j) return;  // single position: unpaired
            double here = mode == 0 ? W[id(i, j)] : Wex[id(i, j)];
            const int mmax = mode == 0 ? j : j - 1;
            bool moved = false;
            for (int m = i + min_len; m <= mmax; ++m) {
                if (V[id(i, m)] == inf) continue;
                if (V[id(i, m)] + w_at(W, m + 1, j) == here) {
                    trace_helix(i, m);
                    i = m + 1;
                    mode = 0;
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                ++i;  // i unpaired
                mode = 0;
            }
        }
    };
    trace_helix = [&](int i, int j) {
        const double target = V[id(i, j)];
        const int max_size = (j - i - min_len) / 2 + 1;
        double stacked = 0.0;
        for (int size = 1; size <= max_size; ++size) {
            int ii = i + size - 1, jj = j - size + 1;
            if (pc(ii, jj) < 0) break;
            if (size >= 2) stacked += model.stack_scores[pc(ii - 1, jj + 1)][pc(ii, jj)];
            if (size >= sigma && stacked + w_at(Wex, ii + 1, jj - 1) == target) {
                for (int t = 0; t < size; ++t) arcs.push_back(Arc{i + t, j - t});
                trace(ii + 1, jj - 1, 1);
                return;
            }
        }
        assert(false && "helix backtrack failed");
    };
    trace(1, n, 0);
    if (energy_out) *energy_out = W[id(1, n)];
    return Structure(n, std::move(arcs));
}

class NussinovOracle final : public FoldingOracle {
public:
    explicit NussinovOracle(EnergyModel model = EnergyModel(), int sigma = 3, int lambda = 4)
        : model_(std::move(model)), sigma_(sigma), lambda_(lambda) {}

    FoldRanking fold(const Sequence& seq, int /*n_best*/ = 1) const override {
        double e = 0.0;
        Structure st = nussinov_fold(seq, model_, sigma_, lambda_, &e);
        FoldRanking r;
        r.query = seq;
        r.entries.push_back(FoldEntry{std::move(st), e});
        return r;
    }

    int length_cap() const override { return std::numeric_limits<int>::max(); }
    const EnergyModel& model() const override { return model_; }

private:
    EnergyModel model_;
    int sigma_, lambda_;
};

}  // namespace pkinv

#endif  // PKINV_ORACLE_HPP
