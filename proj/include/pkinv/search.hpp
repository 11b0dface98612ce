#ifndef PKINV_SEARCH_HPP
#define PKINV_SEARCH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pkinv/intervals.hpp"
#include "pkinv/oracle.hpp"
#include "pkinv/rng.hpp"
#include "pkinv/structure.hpp"

namespace pkinv {

struct SearchParams {
    int n_best = 50;              // suboptimal list size N
    int adjust_rounds = 0;        // 0 = ceil(sqrt(n) / 2)
    int distance_window = 5;
    int step3_retries = 5;
    double uphill_probability = 0.1;
    long local_search_budget = 0;  // phase-I iterations per interval; 0 = 10 * n
    double budget_mult = 1.0;
    uint64_t rng_seed = 20100527;
    bool instrument_splices = false;  // record full-target distance around splices

    int rounds_for(int n) const {
        if (adjust_rounds > 0) return adjust_rounds;
        return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) / 2.0));
    }
    long budget_for(int n) const {
        long base = local_search_budget > 0 ? local_search_budget : 10L * n;
        return std::max<long>(1, std::lround(static_cast<double>(base) * budget_mult));
    }
};

struct RoundRecord {
    int round = 0;
    int distance = 0;        // d of the round's mfe vs target
    int d_min = 0;           // best distance seen so far
    int competitors = 0;
    int mutations = 0;
    int fallbacks = 0;
};

struct SpliceRecord {
    int interval_index = 0;
    int before = 0, after = 0;  // full-target distance around the splice
};

struct SearchTrace {
    std::vector<RoundRecord> rounds;
    Sequence seq_min;
    int d_min = std::numeric_limits<int>::max();
    long oracle_calls = 0;
    long mutation_total = 0;
    long fallback_total = 0;
    long compat_checks = 0;
    long compat_violations = 0;
    std::vector<SpliceRecord> splices;

    void check_compat(const Sequence& s, const Structure& t) {
        ++compat_checks;
        if (!is_compatible(s, t)) ++compat_violations;
    }
};

// ---------------------------------------------------------------------------
// MAKE-START
// ---------------------------------------------------------------------------

// Random compatible sequence: unpaired positions uniform over the four
// bases, each arc uniform over the six allowed pairs.
inline Sequence make_start(const Structure& t, Rng& rng) {
    static const char bases[4] = {'A', 'C', 'G', 'U'};
    Sequence s(static_cast<size_t>(t.n()), 'A');
    for (int w = 1; w <= t.n(); ++w)
        if (!t.paired(w)) s[w - 1] = bases[rng.below(4)];
    for (const Arc& a : t.arcs()) {
        const auto& pair = kAllowedPairs[rng.below(6)];
        s[a.i - 1] = pair[0];
        s[a.j - 1] = pair[1];
    }
    return s;
}

// ---------------------------------------------------------------------------
// Perturbations and competitors
// ---------------------------------------------------------------------------

// nu(S, a): S itself, S with a removed, and S with a replaced by each arc a'
// with |l-shift| <= 1, |r-shift| <= 1, a' != a.  Candidates shifted off the
// diagram are dropped; collisions with other arcs are left in (the caller
// filters inconsistent structures).  Each candidate is a raw arc list.
inline std::vector<std::vector<Arc>> perturb_arc(const Structure& s, const Arc& a) {
    if (!s.has_arc(a))
        throw ArcNotInStructure("perturb_arc: arc (" + std::to_string(a.i) + "," +
                                std::to_string(a.j) + ") not in structure");
    std::vector<Arc> rest;
    for (const Arc& b : s.arcs())
        if (b != a) rest.push_back(b);

    std::vector<std::vector<Arc>> out;
    out.push_back(s.arcs());  // keep a
    out.push_back(rest);      // remove a
    for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
            if (di == 0 && dj == 0) continue;
            Arc moved{a.i + di, a.j + dj};
            if (moved.i < 1 || moved.j > s.n() || moved.i >= moved.j) continue;
            std::vector<Arc> arcs = rest;
            arcs.push_back(moved);
            out.push_back(std::move(arcs));
        }
    }
    return out;
}

struct Competitor {
    Structure structure;
    int origin_rank = 0;  // index h into the ranking it was perturbed from
    int origin_arc = 0;   // arc index j within that structure
};

struct CompetitorSet {
    std::vector<Competitor> competitors;
};

namespace detail {

// degree check over a raw arc list; returns nullopt when some position is
// paired twice (an inconsistent perturbation)
inline std::optional<Structure> try_structure(int n, std::vector<Arc> arcs) {
    std::vector<int> partner(static_cast<size_t>(n) + 1, 0);
    for (const Arc& a : arcs) {
        if (partner[a.i] != 0 || partner[a.j] != 0) return std::nullopt;
        partner[a.i] = a.j;
        partner[a.j] = a.i;
    }
    return Structure(n, std::move(arcs));
}

}  // namespace detail

// Union of perturbations over every arc of every ranked structure, minus
// duplicates, inconsistent structures, structures incompatible with the
// current sequence, and the target itself.
inline CompetitorSet build_competitors(const FoldRanking& ranking, const Sequence& seq,
                                       const Structure& target) {
    CompetitorSet out;
    std::map<std::vector<Arc>, bool> seen;
    for (size_t h = 0; h < ranking.entries.size(); ++h) {
        const Structure& base = ranking.entries[h].structure;
        const auto arcs = base.arcs();
        for (size_t j = 0; j < arcs.size(); ++j) {
            for (auto& candidate : perturb_arc(base, arcs[j])) {
                std::sort(candidate.begin(), candidate.end());
                if (seen.count(candidate)) continue;
                seen.emplace(candidate, true);
                auto st = detail::try_structure(target.n(), candidate);
                if (!st) continue;                       // inconsistent
                if (*st == target) continue;             // identical to target
                if (!is_compatible(seq, *st)) continue;  // incompatible
                out.competitors.push_back(
                    Competitor{std::move(*st), static_cast<int>(h), static_cast<int>(j)});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Step III mutation
// ---------------------------------------------------------------------------

struct MutationStats {
    int mutated = 0;
    int fallbacks = 0;
};

// Adjusts seq against the target and the competitor set: every position some
// competitor pairs differently than T is re-drawn so the result stays
// compatible with T while breaking compatibility with the competitors where
// feasible.  Constraints are evaluated against the pre-mutation sequence.
inline Sequence mutate_against_competitors(const Sequence& seq, const Structure& target,
                                           const CompetitorSet& comps, Rng& rng,
                                           MutationStats* stats = nullptr) {
    static const char bases[4] = {'A', 'C', 'G', 'U'};
    Sequence out = seq;
    MutationStats local;
    for (int w = 1; w <= target.n(); ++w) {
        bool mismatch = false;
        for (const Competitor& c : comps.competitors)
            if (c.structure.partner(w) != target.partner(w)) {
                mismatch = true;
                break;
            }
        if (!mismatch) continue;
        const int v = target.partner(w);
        if (v == 0) {
            // unpaired in T: new base must not pair with any competitor partner
            std::vector<char> choices;
            for (char b : bases) {
                if (b == seq[w - 1]) continue;
                bool ok = true;
                for (const Competitor& c : comps.competitors) {
                    int u = c.structure.partner(w);
                    if (u != 0 && can_pair(b, seq[u - 1])) {
                        ok = false;
                        break;
                    }
                }
                if (ok) choices.push_back(b);
            }
            if (choices.empty()) {
                for (char b : bases)
                    if (b != seq[w - 1]) choices.push_back(b);
                ++local.fallbacks;
            }
            out[w - 1] = choices[rng.below(choices.size())];
            ++local.mutated;
        } else if (v > w) {
            // start point: re-draw the (w, v) pair
            std::vector<int> choices;
            for (int p = 0; p < 6; ++p) {
                if (kAllowedPairs[p][0] == seq[w - 1] && kAllowedPairs[p][1] == seq[v - 1])
                    continue;
                bool ok = true;
                for (const Competitor& c : comps.competitors) {
                    int u = c.structure.partner(w);
                    if (u != 0 && can_pair(kAllowedPairs[p][0], seq[u - 1])) {
                        ok = false;
                        break;
                    }
                }
                if (ok) choices.push_back(p);
            }
            if (choices.empty()) {
                for (int p = 0; p < 6; ++p)
                    if (!(kAllowedPairs[p][0] == seq[w - 1] && kAllowedPairs[p][1] == seq[v - 1]))
                        choices.push_back(p);
                ++local.fallbacks;
            }
            int p = choices[rng.below(choices.size())];
            out[w - 1] = kAllowedPairs[p][0];
            out[v - 1] = kAllowedPairs[p][1];
            ++local.mutated;
        }
        // end points (0 < v < w) were handled at their start point
    }
    if (stats) *stats = local;
    return out;
}

// ---------------------------------------------------------------------------
// ADJUST-SEQ
// ---------------------------------------------------------------------------

// Runs at most ceil(sqrt(n)/2) rounds of fold / perturb / mutate.  Returns
// seq_middle, the last accepted sequence; the best-ever (seq_min, d_min) is
// kept in the trace for the final fallback check.
inline Sequence adjust_seq(const Sequence& start, const Structure& target,
                           const FoldingOracle& oracle, const SearchParams& params, Rng& rng,
                           SearchTrace& trace) {
    Sequence current = start;
    Sequence seq_middle = start;
    trace.seq_min = start;
    trace.check_compat(current, target);
    const int rounds = params.rounds_for(target.n());
    for (int round = 1; round <= rounds; ++round) {
        FoldRanking ranking = oracle.fold(current, params.n_best);
        ++trace.oracle_calls;
        int d = structure_distance(ranking.mfe(), target);
        if (d < trace.d_min) {
            trace.d_min = d;
            trace.seq_min = current;
        }
        if (d == 0) {
            trace.rounds.push_back(RoundRecord{round, d, trace.d_min, 0, 0, 0});
            return current;
        }
        CompetitorSet comps = build_competitors(ranking, current, target);

        // Step III, re-run on rejection; on total rejection take the best
        int used_mutations = 0, used_fallbacks = 0;
        Sequence best_candidate;
        int best_d = std::numeric_limits<int>::max();
        bool accepted = false;
        for (int attempt = 0; attempt <= params.step3_retries; ++attempt) {
            MutationStats stats;
            Sequence candidate = mutate_against_competitors(current, target, comps, rng, &stats);
            trace.mutation_total += stats.mutated;
            trace.fallback_total += stats.fallbacks;
            used_mutations += stats.mutated;
            used_fallbacks += stats.fallbacks;
            FoldRanking probe = oracle.fold(candidate, 1);
            ++trace.oracle_calls;
            int dc = structure_distance(probe.mfe(), target);
            if (dc < best_d) {
                best_d = dc;
                best_candidate = candidate;
            }
            if (dc < trace.d_min + params.distance_window) {
                current = candidate;
                accepted = true;
                break;
            }
        }
        if (!accepted) current = best_candidate;
        seq_middle = current;
        trace.check_compat(current, target);
        trace.rounds.push_back(
            RoundRecord{round, d, trace.d_min, static_cast<int>(comps.competitors.size()),
                        used_mutations, used_fallbacks});
    }
    return seq_middle;
}

// ---------------------------------------------------------------------------
// LOCAL-SEARCH
// ---------------------------------------------------------------------------

namespace detail {

// positions of the restricted target paired differently in the fold, plus
// their immediate neighbors
inline std::vector<bool> mispaired_window(const Structure& folded, const Structure& tsub) {
    const int len = tsub.n();
    std::vector<bool> window(static_cast<size_t>(len) + 1, false);
    for (int p = 1; p <= len; ++p) {
        if (folded.partner(p) == tsub.partner(p)) continue;
        window[p] = true;
        if (p > 1) window[p - 1] = true;
        if (p < len) window[p + 1] = true;
    }
    return window;
}

}  // namespace detail

// Interval-driven stochastic local search (Phase I: identify positions,
// Phase II: test and update).  Only positions contributing to the restricted
// distance, or adjacent to them, are altered; arcs of the target leaving the
// interval are out of bounds for mutation, so every intermediate sequence
// stays compatible with the full target.
inline Sequence local_search(const Sequence& seq_middle, const Structure& target,
                             const IntervalPlan& plan, const FoldingOracle& oracle,
                             const SearchParams& params, Rng& rng, SearchTrace& trace) {
    static const char bases[4] = {'A', 'C', 'G', 'U'};
    Sequence seq = seq_middle;
    {
        FoldRanking probe = oracle.fold(seq, 1);
        ++trace.oracle_calls;
        if (structure_distance(probe.mfe(), target) == 0) return seq;
    }
    const long budget = params.budget_for(target.n());
    for (size_t iv = 0; iv < plan.entries.size(); ++iv) {
        const int lo = plan.entries[iv].lo, hi = plan.entries[iv].hi;
        const int len = hi - lo + 1;
        const Structure tsub = restrict_structure(target, lo, hi);
        Sequence sub = seq.substr(static_cast<size_t>(lo - 1), static_cast<size_t>(len));

        FoldRanking folded = oracle.fold(sub, 1);
        ++trace.oracle_calls;
        int d_min = structure_distance(folded.mfe(), tsub);
        Sequence best_sub = sub;
        int best_d = d_min;

        for (long iter = 0; d_min > 0 && iter < budget; ++iter) {
            // Phase I: positions to work on
            auto window = detail::mispaired_window(folded.mfe(), tsub);
            std::vector<int> u1;          // unpaired in the full target
            std::vector<Arc> u2;          // target arcs inside the interval
            for (int p = 1; p <= len; ++p)
                if (window[p] && target.partner(p + lo - 1) == 0) u1.push_back(p);
            for (const Arc& a : tsub.arcs())
                if (window[a.i] || window[a.j]) u2.push_back(a);

            // Phase II: single mutations, visited in random order
            const size_t total = u1.size() + u2.size();
            if (total == 0) break;  // distance stems from boundary arcs only
            std::vector<size_t> order(total);
            for (size_t t = 0; t < total; ++t) order[t] = t;
            for (size_t t = total; t > 1; --t) std::swap(order[t - 1], order[rng.below(t)]);

            bool moved = false;
            Sequence pool_seq;
            double pool_energy = std::numeric_limits<double>::infinity();
            for (size_t t = 0; t < total && !moved; ++t) {
                Sequence variant = sub;
                if (order[t] < u1.size()) {
                    const int p = u1[order[t]];
                    int bi = base_index(variant[p - 1]);
                    int step = static_cast<int>(rng.below(3));
                    variant[p - 1] = bases[(bi + 1 + step) % 4];
                } else {
                    const Arc a = u2[order[t] - u1.size()];
                    int cur = pair_index(variant[a.i - 1], variant[a.j - 1]);
                    int step = static_cast<int>(rng.below(5));
                    int p = (cur + 1 + step) % 6;
                    variant[a.i - 1] = kAllowedPairs[p][0];
                    variant[a.j - 1] = kAllowedPairs[p][1];
                }
                FoldRanking probe = oracle.fold(variant, 1);
                ++trace.oracle_calls;
                int d = structure_distance(probe.mfe(), tsub);
                if (d < d_min) {
                    sub = variant;
                    folded = probe;
                    d_min = d;
                    if (d_min < best_d) {
                        best_d = d_min;
                        best_sub = sub;
                    }
                    moved = true;
                } else if (d_min < d && d < d_min + params.distance_window &&
                           rng.uniform01() < params.uphill_probability) {
                    sub = variant;
                    folded = probe;
                    moved = true;
                } else if (d == d_min && probe.entries.front().energy_value < pool_energy) {
                    pool_seq = variant;
                    pool_energy = probe.entries.front().energy_value;
                }
            }
            if (!moved && !pool_seq.empty()) {
                sub = pool_seq;
                folded = oracle.fold(sub, 1);
                ++trace.oracle_calls;
            }
        }

        // splice the interval's best subsequence back
        int before = 0;
        if (params.instrument_splices) {
            FoldRanking probe = oracle.fold(seq, 1);
            ++trace.oracle_calls;
            before = structure_distance(probe.mfe(), target);
        }
        seq.replace(static_cast<size_t>(lo - 1), static_cast<size_t>(len), best_sub);
        trace.check_compat(seq, target);
        if (params.instrument_splices) {
            FoldRanking probe = oracle.fold(seq, 1);
            ++trace.oracle_calls;
            int after = structure_distance(probe.mfe(), target);
            trace.splices.push_back(SpliceRecord{static_cast<int>(iv), before, after});
        }
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Inv
// ---------------------------------------------------------------------------

struct InvResult {
    bool success = false;
    Sequence sequence;       // designed sequence on success; best-effort otherwise
    int final_distance = 0;  // 0 on success
    SearchTrace trace;
};

// The full pipeline: validate, MAKE-START, ADJUST-SEQ, DECOMPOSE,
// LOCAL-SEARCH, then verify by a final fold.  Success is never reported
// without the verification fold matching the target arc for arc.
inline InvResult inv(const Structure& target, const FoldingOracle& oracle,
                     const SearchParams& params, Rng& rng, int k = 3, int sigma = 3,
                     int lambda = 4) {
    validate_target(target, k, sigma, lambda);
    InvResult res;
    Sequence start = make_start(target, rng);
    Sequence seq_middle = adjust_seq(start, target, oracle, params, rng, res.trace);
    IntervalPlan plan = decompose_intervals(target);
    Sequence seq = local_search(seq_middle, target, plan, oracle, params, rng, res.trace);

    FoldRanking verify = oracle.fold(seq, 1);
    ++res.trace.oracle_calls;
    int d = structure_distance(verify.mfe(), target);
    if (d == 0) {
        res.success = true;
        res.sequence = seq;
        res.final_distance = 0;
        return res;
    }
    // fall back to the best-ever sequence before declaring failure
    if (!res.trace.seq_min.empty()) {
        FoldRanking check = oracle.fold(res.trace.seq_min, 1);
        ++res.trace.oracle_calls;
        if (structure_distance(check.mfe(), target) == 0) {
            res.success = true;
            res.sequence = res.trace.seq_min;
            res.final_distance = 0;
            return res;
        }
    }
    res.success = false;
    res.sequence = res.trace.seq_min.empty() ? seq : res.trace.seq_min;
    res.final_distance = std::min(d, res.trace.d_min);
    return res;
}

}  // namespace pkinv

#endif  // PKINV_SEARCH_HPP
