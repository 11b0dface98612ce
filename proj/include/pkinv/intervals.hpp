#ifndef PKINV_INTERVALS_HPP
#define PKINV_INTERVALS_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "pkinv/loops.hpp"
#include "pkinv/structure.hpp"

namespace pkinv {

struct PlanInterval {
    int lo = 0, hi = 0;
    char origin = 'a';  // which of a_w / b_w / c_w the interval arose from
    int loop = -1;      // index into the ordered loop list; -1 for the final pad
};

struct IntervalPlan {
    int n = 0;
    std::vector<PlanInterval> entries;  // I_1 .. I_m, I_m = [1, n]
};

namespace detail {

struct MergedLoop {
    LoopKind kind;
    int lo, hi;
    bool umbrella = false;  // covering interval of a whole crossing component
};

// Children-first order: nested spans come first, then by start point.
inline bool loop_order_less(const MergedLoop& x, const MergedLoop& y) {
    const bool x_in_y = (y.lo <= x.lo && x.hi <= y.hi) && !(x.lo == y.lo && x.hi == y.hi);
    const bool y_in_x = (x.lo <= y.lo && y.hi <= x.hi) && !(x.lo == y.lo && x.hi == y.hi);
    if (x_in_y) return true;
    if (y_in_x) return false;
    if (x.lo != y.lo) return x.lo < y.lo;
    throw std::logic_error("loop order tie: identical spans");
}

}  // namespace detail

// Derives the ordered interval sequence I_1, ..., I_m that drives the local
// search.  Loops are taken with all arcs of their associated stems: every
// stack is attached to the loop of its innermost arc, which dissolves the
// two-arc interior loops inside helices.  Each crossing-connected group of
// arcs additionally contributes one covering interval, so a pseudoknotted
// region is re-optimized as a whole before the search moves outward.
inline IntervalPlan decompose_intervals(const Structure& s) {
    LoopDecomposition d = decompose_loops(s);
    const auto& arcs = s.arcs();
    const int m = static_cast<int>(arcs.size());

    auto arc_index = [&](const Arc& a) {
        auto it = std::lower_bound(arcs.begin(), arcs.end(), a);
        return static_cast<int>(it - arcs.begin());
    };

    // degenerate interior loops (both gaps empty) dissolve into their stack
    std::vector<bool> dissolved(d.loops.size(), false);
    for (size_t li = 0; li < d.loops.size(); ++li) {
        const Loop& loop = d.loops[li];
        dissolved[li] = loop.kind == LoopKind::Interior && loop.unpaired.empty();
    }

    // span accumulation: every stack widens the loop of its innermost arc
    std::vector<int> span_lo(d.loops.size(), 0), span_hi(d.loops.size(), 0);
    for (size_t li = 0; li < d.loops.size(); ++li) {
        span_lo[li] = d.loops[li].lo;
        span_hi[li] = d.loops[li].hi;
    }
    for (const StackRun& st : stacks(s)) {
        int dest = d.loop_of_arc[arc_index(st.inner())];
        assert(dest >= 0 && !dissolved[dest]);
        span_lo[dest] = std::min(span_lo[dest], st.outer.i);
        span_hi[dest] = std::max(span_hi[dest], st.outer.j);
    }

    std::vector<detail::MergedLoop> merged;
    for (size_t li = 0; li < d.loops.size(); ++li)
        if (!dissolved[li])
            merged.push_back({d.loops[li].kind, span_lo[li], span_hi[li], false});

    // covering interval per crossing component (with stems)
    if (m > 0) {
        auto comp = detail::graph_components(m, crossing_edges(s));
        int ncomp = *std::max_element(comp.begin(), comp.end()) + 1;
        std::vector<int> clo(ncomp, 0), chi(ncomp, 0), size(ncomp, 0);
        for (int a = 0; a < m; ++a) {
            int c = comp[a];
            if (size[c]++ == 0) {
                clo[c] = arcs[a].i;
                chi[c] = arcs[a].j;
            } else {
                clo[c] = std::min(clo[c], arcs[a].i);
                chi[c] = std::max(chi[c], arcs[a].j);
            }
        }
        for (const StackRun& st : stacks(s)) {
            int c = comp[arc_index(st.inner())];
            clo[c] = std::min(clo[c], st.outer.i);
            chi[c] = std::max(chi[c], st.outer.j);
        }
        for (int c = 0; c < ncomp; ++c) {
            if (size[c] < 2) continue;
            bool duplicate = false;
            for (const auto& ml : merged)
                if (ml.lo == clo[c] && ml.hi == chi[c]) duplicate = true;
            if (!duplicate)
                merged.push_back({LoopKind::Pseudoknot, clo[c], chi[c], true});
        }
    }

    std::sort(merged.begin(), merged.end(), detail::loop_order_less);

    IntervalPlan plan;
    plan.n = s.n();
    auto emit = [&](int lo, int hi, char origin, int loop) {
        if (!plan.entries.empty() && plan.entries.back().lo == lo && plan.entries.back().hi == hi)
            return;
        plan.entries.push_back(PlanInterval{lo, hi, origin, loop});
    };
    int acc_lo = 0, acc_hi = 0;
    for (size_t w = 0; w < merged.size(); ++w) {
        const auto& ml = merged[w];
        emit(ml.lo, ml.hi, 'a', static_cast<int>(w));
        // b_w: widen by the adjacent runs of unpaired nucleotides
        int blo = ml.lo, bhi = ml.hi;
        while (blo > 1 && !s.paired(blo - 1)) --blo;
        while (bhi < s.n() && !s.paired(bhi + 1)) ++bhi;
        emit(blo, bhi, 'b', static_cast<int>(w));
        // c_w: interval hull of b_1 .. b_w
        if (w == 0) {
            acc_lo = blo;
            acc_hi = bhi;
        } else {
            acc_lo = std::min(acc_lo, blo);
            acc_hi = std::max(acc_hi, bhi);
        }
        emit(acc_lo, acc_hi, 'c', static_cast<int>(w));
    }
    if (plan.entries.empty() || plan.entries.back().lo != 1 || plan.entries.back().hi != s.n())
        plan.entries.push_back(PlanInterval{1, s.n(), 'c', -1});
    return plan;
}

}  // namespace pkinv

#endif  // PKINV_INTERVALS_HPP
