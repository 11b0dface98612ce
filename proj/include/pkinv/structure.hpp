#ifndef PKINV_STRUCTURE_HPP
#define PKINV_STRUCTURE_HPP

#include <algorithm>
#include <array>
#include <cassert>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pkinv {

// Positions are 1-based throughout, matching the usual diagram convention.

struct UnbalancedBracket : std::runtime_error {
    explicit UnbalancedBracket(const std::string& what) : std::runtime_error(what) {}
};
struct IllegalCharacter : std::runtime_error {
    explicit IllegalCharacter(const std::string& what) : std::runtime_error(what) {}
};
struct LengthMismatch : std::runtime_error {
    explicit LengthMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct IncompatibleSequence : std::runtime_error {
    explicit IncompatibleSequence(const std::string& what) : std::runtime_error(what) {}
};
struct NotRepresentable : std::runtime_error {
    explicit NotRepresentable(const std::string& what) : std::runtime_error(what) {}
};
struct NotThreeNoncrossing : std::runtime_error {
    explicit NotThreeNoncrossing(const std::string& what) : std::runtime_error(what) {}
};
struct ArcNotInStructure : std::runtime_error {
    explicit ArcNotInStructure(const std::string& what) : std::runtime_error(what) {}
};
struct CapExceeded : std::runtime_error {
    explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidTarget : std::runtime_error {
    explicit InvalidTarget(const std::string& what) : std::runtime_error(what) {}
};

struct Arc {
    int i = 0;  // start point, i < j
    int j = 0;  // end point

    friend auto operator<=>(const Arc&, const Arc&) = default;
};

// Two arcs cross iff i1 < i2 < j1 < j2 (in either role).
inline bool arcs_cross(const Arc& a, const Arc& b) {
    return (a.i < b.i && b.i < a.j && a.j < b.j) || (b.i < a.i && a.i < b.j && b.j < a.j);
}

// b strictly nested in a: a.i < b.i < b.j < a.j.
inline bool arc_nested_in(const Arc& b, const Arc& a) {
    return a.i < b.i && b.j < a.j;
}

// A diagram over [n]: vertex degree <= 1, arcs (i, j) with 1 <= i < j <= n.
// Construction enforces only degree <= 1; crossing number, arc length and
// stack size are checked by predicates / target validation.
class Structure {
public:
    Structure() = default;

    Structure(int n, std::vector<Arc> arcs) : n_(n), arcs_(std::move(arcs)) {
        if (n_ < 0) throw std::invalid_argument("Structure: negative length");
        std::sort(arcs_.begin(), arcs_.end());
        partner_.assign(static_cast<size_t>(n_) + 1, 0);
        for (const Arc& a : arcs_) {
            if (a.i < 1 || a.j > n_ || a.i >= a.j)
                throw std::invalid_argument("Structure: arc out of range");
            if (partner_[a.i] != 0 || partner_[a.j] != 0)
                throw std::invalid_argument("Structure: position paired twice");
            partner_[a.i] = a.j;
            partner_[a.j] = a.i;
        }
    }

    int n() const { return n_; }
    const std::vector<Arc>& arcs() const { return arcs_; }

    // p(S, w): position paired to w, or 0 if unpaired.
    int partner(int w) const {
        assert(w >= 1 && w <= n_);
        return partner_[w];
    }
    bool paired(int w) const { return partner(w) != 0; }
    const std::vector<int>& pair_table() const { return partner_; }

    bool has_arc(const Arc& a) const { return a.i >= 1 && a.j <= n_ && partner_[a.i] == a.j; }

    friend bool operator==(const Structure& x, const Structure& y) {
        return x.n_ == y.n_ && x.arcs_ == y.arcs_;
    }

private:
    int n_ = 0;
    std::vector<Arc> arcs_;
    std::vector<int> partner_{0};  // index 0 unused
};

using Sequence = std::string;  // over {A, C, G, U}

// ---------------------------------------------------------------------------
// Dot-bracket parsing and serialization
// ---------------------------------------------------------------------------

// Parses ":()[]{}" notation, one stack per bracket family.
inline Structure parse_structure(const std::string& text) {
    if (text.empty()) throw IllegalCharacter("empty structure string");
    static const std::string open = "([{";
    static const std::string close = ")]}";
    std::array<std::vector<int>, 3> stacks;
    std::vector<Arc> arcs;
    const int n = static_cast<int>(text.size());
    for (int w = 1; w <= n; ++w) {
        const char c = text[w - 1];
        if (c == ':' || c == '.') continue;  // '.' accepted as a common alias
        size_t fo = open.find(c);
        if (fo != std::string::npos) {
            stacks[fo].push_back(w);
            continue;
        }
        size_t fc = close.find(c);
        if (fc != std::string::npos) {
            if (stacks[fc].empty())
                throw UnbalancedBracket("unmatched '" + std::string(1, c) + "' at position " +
                                        std::to_string(w));
            arcs.push_back(Arc{stacks[fc].back(), w});
            stacks[fc].pop_back();
            continue;
        }
        throw IllegalCharacter("illegal character '" + std::string(1, c) + "' at position " +
                               std::to_string(w));
    }
    for (size_t f = 0; f < 3; ++f) {
        if (!stacks[f].empty())
            throw UnbalancedBracket("unmatched '" + std::string(1, open[f]) + "' at position " +
                                    std::to_string(stacks[f].back()));
    }
    return Structure(n, std::move(arcs));
}

// Greedy first-fit page assignment over arcs sorted by start point:
// "()" first, then "[]", then "{}".
inline std::string serialize_structure(const Structure& s) {
    std::string out(static_cast<size_t>(s.n()), ':');
    static const char opens[3] = {'(', '[', '{'};
    static const char closes[3] = {')', ']', '}'};
    std::array<std::vector<Arc>, 3> pages;
    for (const Arc& a : s.arcs()) {
        int page = -1;
        for (int p = 0; p < 3 && page < 0; ++p) {
            bool ok = true;
            for (const Arc& b : pages[p]) {
                if (arcs_cross(a, b)) {
                    ok = false;
                    break;
                }
            }
            if (ok) page = p;
        }
        if (page < 0)
            throw NotRepresentable("arc set needs more than three noncrossing pages");
        pages[page].push_back(a);
        out[a.i - 1] = opens[page];
        out[a.j - 1] = closes[page];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Crossings
// ---------------------------------------------------------------------------

// Largest c such that S contains c mutually crossing arcs.
//
// A mutually crossing set, listed by start point, has increasing start and
// end points with every start before the first end.  Fixing the arc with the
// smallest start, the remaining arcs all cross it from the right and are
// mutually crossing iff their end points increase with their start points,
// so the answer is 1 + LIS over end points of the right-crossers.
inline int crossing_number(const Structure& s) {
    const auto& arcs = s.arcs();  // sorted by (i, j)
    int best = arcs.empty() ? 0 : 1;
    std::vector<int> ends;
    for (size_t h = 0; h < arcs.size(); ++h) {
        ends.clear();
        for (size_t t = h + 1; t < arcs.size(); ++t) {
            if (arcs[t].i >= arcs[h].j) break;
            if (arcs[t].j > arcs[h].j) ends.push_back(arcs[t].j);
        }
        // strictly increasing LIS via patience lower_bound
        std::vector<int> tail;
        for (int e : ends) {
            auto it = std::lower_bound(tail.begin(), tail.end(), e);
            if (it == tail.end())
                tail.push_back(e);
            else
                *it = e;
        }
        best = std::max(best, 1 + static_cast<int>(tail.size()));
    }
    return best;
}

inline bool is_k_noncrossing(const Structure& s, int k) { return crossing_number(s) <= k - 1; }

// ---------------------------------------------------------------------------
// Stacks
// ---------------------------------------------------------------------------

struct StackRun {
    Arc outer;     // outermost arc of the run
    int size = 1;  // number of parallel arcs

    Arc arc_at(int t) const { return Arc{outer.i + t, outer.j - t}; }
    Arc inner() const { return arc_at(size - 1); }
};

// Maximal runs of consecutive parallel arcs; partitions the arc set.
inline std::vector<StackRun> stacks(const Structure& s) {
    std::vector<StackRun> runs;
    for (const Arc& a : s.arcs()) {
        // a starts a run iff (i-1, j+1) is not an arc
        if (a.i > 1 && a.j < s.n() && s.partner(a.i - 1) == a.j + 1) continue;
        StackRun run{a, 1};
        while (run.outer.i + run.size < run.outer.j - run.size &&
               s.partner(run.outer.i + run.size) == run.outer.j - run.size)
            ++run.size;
        runs.push_back(run);
    }
    return runs;
}

inline bool is_sigma_canonical(const Structure& s, int sigma) {
    for (const StackRun& r : stacks(s))
        if (r.size < sigma) return false;
    return true;
}

inline int min_arc_length(const Structure& s) {
    int m = 0;
    for (const Arc& a : s.arcs()) {
        int len = a.j - a.i;
        if (m == 0 || len < m) m = len;
    }
    return m;  // 0 for arcless
}

// CHECK-STRU semantics for a canonical target: k-noncrossing, arc length
// >= lambda, stack size >= sigma.  Throws InvalidTarget with the reason.
inline void validate_target(const Structure& s, int k = 3, int sigma = 3, int lambda = 4) {
    if (!is_k_noncrossing(s, k))
        throw InvalidTarget("structure contains " + std::to_string(crossing_number(s)) +
                            " mutually crossing arcs (k = " + std::to_string(k) + ")");
    for (const Arc& a : s.arcs()) {
        if (a.j - a.i < lambda)
            throw InvalidTarget("arc (" + std::to_string(a.i) + "," + std::to_string(a.j) +
                                ") shorter than minimum arc length " + std::to_string(lambda));
    }
    for (const StackRun& r : stacks(s)) {
        if (r.size < sigma)
            throw InvalidTarget("stack at (" + std::to_string(r.outer.i) + "," +
                                std::to_string(r.outer.j) + ") has size " +
                                std::to_string(r.size) + " < " + std::to_string(sigma));
    }
}

// ---------------------------------------------------------------------------
// Structure distance
// ---------------------------------------------------------------------------

// Number of positions paired differently: w counts 0 iff w is unpaired in
// both structures or incident to an arc contained in both.
inline int structure_distance(const Structure& a, const Structure& b) {
    if (a.n() != b.n())
        throw LengthMismatch("structure_distance: lengths " + std::to_string(a.n()) + " vs " +
                             std::to_string(b.n()));
    int d = 0;
    for (int w = 1; w <= a.n(); ++w)
        if (a.partner(w) != b.partner(w)) ++d;
    return d;
}

// ---------------------------------------------------------------------------
// Sequence / structure compatibility
// ---------------------------------------------------------------------------

inline bool is_nucleotide(char c) { return c == 'A' || c == 'C' || c == 'G' || c == 'U'; }

inline void validate_sequence(const Sequence& s) {
    for (size_t h = 0; h < s.size(); ++h)
        if (!is_nucleotide(s[h]))
            throw IllegalCharacter("illegal base '" + std::string(1, s[h]) + "' at position " +
                                   std::to_string(h + 1));
}

// Allowed pairs: A-U, U-A, G-C, C-G, G-U, U-G.
inline bool can_pair(char x, char y) {
    return (x == 'A' && y == 'U') || (x == 'U' && y == 'A') || (x == 'G' && y == 'C') ||
           (x == 'C' && y == 'G') || (x == 'G' && y == 'U') || (x == 'U' && y == 'G');
}

// Fixed pair order used everywhere a deterministic draw over pairs is needed.
inline constexpr std::array<std::array<char, 2>, 6> kAllowedPairs = {
    {{'A', 'U'}, {'U', 'A'}, {'G', 'C'}, {'C', 'G'}, {'G', 'U'}, {'U', 'G'}}};

inline int pair_index(char x, char y) {
    for (int h = 0; h < 6; ++h)
        if (kAllowedPairs[h][0] == x && kAllowedPairs[h][1] == y) return h;
    return -1;
}

inline bool is_compatible(const Sequence& s, const Structure& t) {
    if (static_cast<int>(s.size()) != t.n())
        throw LengthMismatch("is_compatible: sequence length " + std::to_string(s.size()) +
                             " vs structure length " + std::to_string(t.n()));
    for (const Arc& a : t.arcs())
        if (!can_pair(s[a.i - 1], s[a.j - 1])) return false;
    return true;
}

// Hamming distance in Q4^{n_u} x Q6^{n_p}: one unit per differing unpaired
// position plus one unit per arc whose induced pair differs.
inline int compatible_distance(const Sequence& s, const Sequence& t, const Structure& st) {
    if (!is_compatible(s, st) || !is_compatible(t, st))
        throw IncompatibleSequence("compatible_distance: sequence not compatible with structure");
    int d = 0;
    for (int w = 1; w <= st.n(); ++w)
        if (!st.paired(w) && s[w - 1] != t[w - 1]) ++d;
    for (const Arc& a : st.arcs())
        if (s[a.i - 1] != t[a.i - 1] || s[a.j - 1] != t[a.j - 1]) ++d;
    return d;
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

inline Structure all_unpaired(int n) { return Structure(n, {}); }

// Substructure over [lo, hi], renumbered to 1..(hi-lo+1); arcs leaving the
// window are dropped.
inline Structure restrict_structure(const Structure& s, int lo, int hi) {
    std::vector<Arc> arcs;
    for (const Arc& a : s.arcs())
        if (a.i >= lo && a.j <= hi) arcs.push_back(Arc{a.i - lo + 1, a.j - lo + 1});
    return Structure(hi - lo + 1, std::move(arcs));
}

}  // namespace pkinv

#endif  // PKINV_STRUCTURE_HPP
