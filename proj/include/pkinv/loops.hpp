#ifndef PKINV_LOOPS_HPP
#define PKINV_LOOPS_HPP

#include <algorithm>
#include <cassert>
#include <limits>
#include <utility>
#include <vector>

#include "pkinv/structure.hpp"

namespace pkinv {

enum class LoopKind { Hairpin, Interior, Multi, Pseudoknot };

inline const char* loop_kind_name(LoopKind k) {
    switch (k) {
        case LoopKind::Hairpin: return "hairpin";
        case LoopKind::Interior: return "interior";
        case LoopKind::Multi: return "multi";
        case LoopKind::Pseudoknot: return "pseudoknot";
    }
    return "?";
}

struct Loop {
    LoopKind kind = LoopKind::Hairpin;
    std::vector<Arc> arcs;      // defining arcs; for a pseudoknot, the set P
    std::vector<int> unpaired;  // unpaired positions belonging to this loop
    int lo = 0, hi = 0;         // extreme positions touched

    void finish_span() {
        lo = std::numeric_limits<int>::max();
        hi = 0;
        for (const Arc& a : arcs) {
            lo = std::min(lo, a.i);
            hi = std::max(hi, a.j);
        }
        for (int x : unpaired) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
};

struct LoopDecomposition {
    std::vector<Loop> loops;
    // assignment: arc index (into Structure::arcs()) -> loop index
    std::vector<int> loop_of_arc;
    // position -> loop index for unpaired positions; -1 = exterior or paired
    std::vector<int> loop_of_unpaired;
    std::vector<int> exterior;  // unpaired positions outside every loop
};

// ---------------------------------------------------------------------------
// Crossing graph, minimal beta-crossing, core, L-graph, planarity
// ---------------------------------------------------------------------------

// Edges (h, t) over arc indices, h < t, whenever the two arcs cross.
inline std::vector<std::pair<int, int>> crossing_edges(const Structure& s) {
    const auto& arcs = s.arcs();
    std::vector<std::pair<int, int>> edges;
    for (size_t h = 0; h < arcs.size(); ++h)
        for (size_t t = h + 1; t < arcs.size(); ++t)
            if (arcs_cross(arcs[h], arcs[t])) edges.emplace_back(int(h), int(t));
    return edges;
}

// The <=-minimal elements of A_S(beta), the set of arcs crossing beta.
inline std::vector<Arc> minimal_beta_crossing(const Structure& s, const Arc& beta) {
    if (!s.has_arc(beta))
        throw ArcNotInStructure("arc (" + std::to_string(beta.i) + "," + std::to_string(beta.j) +
                                ") not in structure");
    std::vector<Arc> crossers;
    for (const Arc& a : s.arcs())
        if (arcs_cross(a, beta)) crossers.push_back(a);
    std::vector<Arc> minimal;
    for (const Arc& a : crossers) {
        bool ok = true;
        for (const Arc& b : crossers)
            if (b != a && arc_nested_in(b, a)) {
                ok = false;
                break;
            }
        if (ok) minimal.push_back(a);
    }
    return minimal;
}

// Collapse each maximal stack to its outermost arc, dropping the interior
// arcs' endpoints and relabeling the remaining positions 1..n'.
inline Structure core(const Structure& s) {
    std::vector<bool> drop(static_cast<size_t>(s.n()) + 1, false);
    for (const StackRun& r : stacks(s)) {
        for (int t = 1; t < r.size; ++t) {
            drop[r.outer.i + t] = true;
            drop[r.outer.j - t] = true;
        }
    }
    std::vector<int> relabel(static_cast<size_t>(s.n()) + 1, 0);
    int next = 0;
    for (int w = 1; w <= s.n(); ++w)
        if (!drop[w]) relabel[w] = ++next;
    std::vector<Arc> arcs;
    for (const StackRun& r : stacks(s)) arcs.push_back(Arc{relabel[r.outer.i], relabel[r.outer.j]});
    return Structure(next, std::move(arcs));
}

struct CoreAndLGraph {
    Structure core_structure;
    std::vector<std::pair<int, int>> edges;  // crossing pairs over core arcs
};

inline CoreAndLGraph l_graph(const Structure& s) {
    Structure c = core(s);
    auto edges = crossing_edges(c);
    return CoreAndLGraph{std::move(c), std::move(edges)};
}

namespace detail {

inline std::vector<int> graph_components(int vertices,
                                         const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(vertices);
    for (auto [h, t] : edges) {
        adj[h].push_back(t);
        adj[t].push_back(h);
    }
    std::vector<int> comp(vertices, -1);
    int c = 0;
    std::vector<int> queue;
    for (int v = 0; v < vertices; ++v) {
        if (comp[v] >= 0) continue;
        comp[v] = c;
        queue.assign(1, v);
        while (!queue.empty()) {
            int u = queue.back();
            queue.pop_back();
            for (int w : adj[u])
                if (comp[w] < 0) {
                    comp[w] = c;
                    queue.push_back(w);
                }
        }
        ++c;
    }
    return comp;
}

}  // namespace detail

// Bi-secondary test: true iff the crossing-conflict graph is bipartite, i.e.
// the arcs are 2-colorable into two noncrossing pages.
inline bool is_planar(const Structure& s) {
    const int m = static_cast<int>(s.arcs().size());
    std::vector<std::vector<int>> adj(m);
    for (auto [h, t] : crossing_edges(s)) {
        adj[h].push_back(t);
        adj[t].push_back(h);
    }
    std::vector<int> color(m, -1);
    std::vector<int> queue;
    for (int v = 0; v < m; ++v) {
        if (color[v] >= 0) continue;
        color[v] = 0;
        queue.assign(1, v);
        while (!queue.empty()) {
            int u = queue.back();
            queue.pop_back();
            for (int w : adj[u]) {
                if (color[w] < 0) {
                    color[w] = 1 - color[u];
                    queue.push_back(w);
                } else if (color[w] == color[u]) {
                    return false;
                }
            }
        }
    }
    return true;
}

// Skeleton: the core has no noncrossing arcs and its L-graph is connected.
inline bool is_skeleton(const Structure& s) {
    CoreAndLGraph cl = l_graph(s);
    const int m = static_cast<int>(cl.core_structure.arcs().size());
    if (m == 0) return false;
    std::vector<int> degree(m, 0);
    for (auto [h, t] : cl.edges) {
        ++degree[h];
        ++degree[t];
    }
    for (int v = 0; v < m; ++v)
        if (degree[v] == 0) return false;
    auto comp = detail::graph_components(m, cl.edges);
    for (int v = 0; v < m; ++v)
        if (comp[v] != 0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Loop decomposition
// ---------------------------------------------------------------------------

namespace detail {

struct ArcContext {
    std::vector<int> children;                     // direct child arc indices
    std::vector<std::pair<int, int>> blocks;       // merged child spans
    std::vector<int> direct_unpaired;              // unpaired, outside blocks
    bool has_direct_leg = false;                   // paired-to-outside, outside blocks
};

inline bool in_blocks(const std::vector<std::pair<int, int>>& blocks, int x) {
    for (auto [lo, hi] : blocks)
        if (lo <= x && x <= hi) return true;
    return false;
}

// Context of the region strictly inside (lo, hi) given the direct children.
inline ArcContext make_context(const Structure& s, int lo, int hi, std::vector<int> children) {
    ArcContext ctx;
    ctx.children = std::move(children);
    std::vector<std::pair<int, int>> spans;
    for (int c : ctx.children) spans.emplace_back(s.arcs()[c].i, s.arcs()[c].j);
    std::sort(spans.begin(), spans.end());
    for (auto sp : spans) {
        if (!ctx.blocks.empty() && sp.first <= ctx.blocks.back().second)
            ctx.blocks.back().second = std::max(ctx.blocks.back().second, sp.second);
        else
            ctx.blocks.push_back(sp);
    }
    for (int x = lo + 1; x < hi; ++x) {
        if (in_blocks(ctx.blocks, x)) continue;
        int p = s.partner(x);
        if (p == 0)
            ctx.direct_unpaired.push_back(x);
        else if (p < lo || p > hi)
            ctx.has_direct_leg = true;
    }
    return ctx;
}

}  // namespace detail

// Unique partition of arcs and unpaired positions into hairpin, interior,
// multi and pseudoknot loops.  Each arc is assigned to the loop it closes;
// arcs that close nothing (those with a crossing arc's endpoint directly
// accessible below them) form the pseudoknot loops, grouped by crossing
// connectivity.  Residual unpaired positions inside a pseudoknot's span
// join that pseudoknot; all other unpaired positions are exterior.
inline LoopDecomposition decompose_loops(const Structure& s) {
    if (!is_k_noncrossing(s, 3))
        throw NotThreeNoncrossing("structure has crossing number " +
                                  std::to_string(crossing_number(s)));
    const auto& arcs = s.arcs();
    const int m = static_cast<int>(arcs.size());

    // direct parents: minimal containers; children lists per arc (-1 = root)
    std::vector<std::vector<int>> children(static_cast<size_t>(m) + 1);
    for (int b = 0; b < m; ++b) {
        std::vector<int> containers;
        for (int a = 0; a < m; ++a)
            if (a != b && arc_nested_in(arcs[b], arcs[a])) containers.push_back(a);
        bool direct_of_some = false;
        for (int a : containers) {
            bool minimal = true;
            for (int c : containers)
                if (c != a && arc_nested_in(arcs[c], arcs[a])) {
                    minimal = false;
                    break;
                }
            if (minimal) {
                children[a].push_back(b);
                direct_of_some = true;
            }
        }
        if (!direct_of_some) children[m].push_back(b);  // top level
    }

    LoopDecomposition out;
    out.loop_of_arc.assign(m, -1);
    out.loop_of_unpaired.assign(static_cast<size_t>(s.n()) + 1, -1);

    std::vector<int> pseudo_arcs;
    for (int a = 0; a < m; ++a) {
        detail::ArcContext ctx = detail::make_context(s, arcs[a].i, arcs[a].j, children[a]);
        if (ctx.has_direct_leg) {
            pseudo_arcs.push_back(a);
            continue;
        }
        Loop loop;
        loop.arcs.push_back(arcs[a]);
        loop.unpaired = ctx.direct_unpaired;
        if (ctx.blocks.empty()) {
            loop.kind = LoopKind::Hairpin;
        } else if (ctx.blocks.size() == 1 && ctx.children.size() == 1) {
            loop.kind = LoopKind::Interior;
            loop.arcs.push_back(arcs[ctx.children.front()]);
        } else {
            loop.kind = LoopKind::Multi;
        }
        loop.finish_span();
        out.loop_of_arc[a] = static_cast<int>(out.loops.size());
        for (int x : loop.unpaired) out.loop_of_unpaired[x] = static_cast<int>(out.loops.size());
        out.loops.push_back(std::move(loop));
    }

    // pseudoknot loops: components of the crossing graph restricted to the
    // arcs that close nothing
    if (!pseudo_arcs.empty()) {
        const int pm = static_cast<int>(pseudo_arcs.size());
        std::vector<std::pair<int, int>> edges;
        for (int h = 0; h < pm; ++h)
            for (int t = h + 1; t < pm; ++t)
                if (arcs_cross(arcs[pseudo_arcs[h]], arcs[pseudo_arcs[t]]))
                    edges.emplace_back(h, t);
        auto comp = detail::graph_components(pm, edges);
        int ncomp = *std::max_element(comp.begin(), comp.end()) + 1;
        std::vector<int> loop_index(ncomp, -1);
        for (int c = 0; c < ncomp; ++c) {
            Loop loop;
            loop.kind = LoopKind::Pseudoknot;
            loop_index[c] = static_cast<int>(out.loops.size());
            out.loops.push_back(std::move(loop));
        }
        for (int h = 0; h < pm; ++h) {
            int li = loop_index[comp[h]];
            out.loops[li].arcs.push_back(arcs[pseudo_arcs[h]]);
            out.loop_of_arc[pseudo_arcs[h]] = li;
        }
    }

    // P2: unclaimed unpaired positions inside the innermost pseudoknot span
    std::vector<int> pk_loops;
    for (size_t li = 0; li < out.loops.size(); ++li)
        if (out.loops[li].kind == LoopKind::Pseudoknot) {
            out.loops[li].finish_span();
            pk_loops.push_back(static_cast<int>(li));
        }
    for (int x = 1; x <= s.n(); ++x) {
        if (s.paired(x) || out.loop_of_unpaired[x] >= 0) continue;
        int best = -1, best_width = std::numeric_limits<int>::max();
        for (int li : pk_loops) {
            const Loop& pk = out.loops[li];
            if (pk.lo < x && x < pk.hi && pk.hi - pk.lo < best_width) {
                best = li;
                best_width = pk.hi - pk.lo;
            }
        }
        if (best >= 0) {
            out.loops[best].unpaired.push_back(x);
            out.loop_of_unpaired[x] = best;
        } else {
            out.exterior.push_back(x);
        }
    }
    for (int li : pk_loops) {
        std::sort(out.loops[li].unpaired.begin(), out.loops[li].unpaired.end());
        out.loops[li].finish_span();
    }
    return out;
}

// Post-hoc (P1)(ii) check: every arc of every pseudoknot loop is a minimal
// beta-crossing arc for some beta.
inline bool pseudoknot_arcs_minimal_crossing(const Structure& s, const LoopDecomposition& d) {
    std::vector<Arc> minimal_union;
    for (const Arc& beta : s.arcs()) {
        auto mins = minimal_beta_crossing(s, beta);
        minimal_union.insert(minimal_union.end(), mins.begin(), mins.end());
    }
    std::sort(minimal_union.begin(), minimal_union.end());
    for (const Loop& loop : d.loops) {
        if (loop.kind != LoopKind::Pseudoknot) continue;
        for (const Arc& a : loop.arcs)
            if (!std::binary_search(minimal_union.begin(), minimal_union.end(), a)) return false;
    }
    return true;
}

}  // namespace pkinv

#endif  // PKINV_LOOPS_HPP
