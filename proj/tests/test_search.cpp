#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "pkinv/search.hpp"
#include "test_util.hpp"

using namespace pkinv;

namespace {

const char* kHairpin10 = "(((....)))";           // single stem-loop
const char* kHType18 = "(((:::[[[))):::]]]";     // canonical H-type pseudoknot

SearchParams quick_params(uint64_t seed) {
    SearchParams p;
    p.rng_seed = seed;
    return p;
}

}  // namespace

TEST_CASE("make_start: always compatible, uniform per slot") {
    Rng rng(101);
    for (int t = 0; t < 100; ++t) {
        int n = 8 + static_cast<int>(rng.below(12));
        Structure s = testutil::random_structure(n, 4, 4, 3, rng);
        CHECK(is_compatible(make_start(s, rng), s));
    }

    // single arc: each of the six pairs with frequency about 1/6
    Structure one(12, {{1, 12}});
    std::map<std::string, int> freq;
    Rng draw(2024);
    const int trials = 60000;
    for (int t = 0; t < trials; ++t) {
        Sequence s = make_start(one, draw);
        freq[std::string(1, s[0]) + s[11]]++;
    }
    CHECK(freq.size() == 6);
    for (auto& [pair, count] : freq)
        CHECK(std::abs(count / double(trials) - 1.0 / 6.0) < 0.01);

    // arcless: each base about 1/4 at every position
    Structure none = all_unpaired(4);
    std::map<char, int> base_freq;
    for (int t = 0; t < trials; ++t) {
        Sequence s = make_start(none, draw);
        for (char c : s) base_freq[c]++;
    }
    for (auto& [b, count] : base_freq)
        CHECK(std::abs(count / double(4 * trials) - 0.25) < 0.01);
}

TEST_CASE("perturb_arc: candidate counts") {
    // interior arc with free flanks: keep + remove + eight shifts
    Structure s(12, {{3, 9}});
    CHECK(perturb_arc(s, Arc{3, 9}).size() == 10);

    // start point on the boundary: the three left shifts fall off
    Structure left(12, {{1, 8}});
    CHECK(perturb_arc(left, Arc{1, 8}).size() == 7);

    // both endpoints on the boundary
    Structure both(12, {{1, 12}});
    CHECK(perturb_arc(both, Arc{1, 12}).size() == 5);

    // minimal-length arc: pulling both ends inward collapses one candidate
    Structure tiny(12, {{5, 7}});
    CHECK(perturb_arc(tiny, Arc{5, 7}).size() == 9);

    CHECK_THROWS_AS(perturb_arc(s, Arc{2, 9}), ArcNotInStructure);

    // shifting onto an occupied endpoint is still emitted (caller filters)
    Structure pair2(12, {{3, 9}, {4, 12}});
    auto cands = perturb_arc(pair2, Arc{3, 9});
    CHECK(cands.size() == 10);
    bool collision_seen = false;
    for (auto& arcs : cands) {
        std::vector<int> degree(13, 0);
        bool ok = true;
        for (auto& a : arcs) {
            if (++degree[a.i] > 1 || ++degree[a.j] > 1) ok = false;
        }
        if (!ok) collision_seen = true;
    }
    CHECK(collision_seen);
}

TEST_CASE("build_competitors: filtering invariants") {
    ExhaustiveOracle oracle;
    Structure target = parse_structure(kHairpin10);
    Sequence seq = "GGGAAAACCC";
    FoldRanking ranking = oracle.fold(seq, 50);
    REQUIRE(ranking.mfe() == target);

    CompetitorSet comps = build_competitors(ranking, seq, target);
    CHECK_FALSE(comps.competitors.empty());

    long arc_total = 0;
    for (const auto& e : ranking.entries) arc_total += static_cast<long>(e.structure.arcs().size());
    CHECK(static_cast<long>(comps.competitors.size()) <= 10 * arc_total);

    std::set<std::vector<Arc>> seen;
    for (const Competitor& c : comps.competitors) {
        CHECK(c.structure.n() == target.n());
        CHECK_FALSE(c.structure == target);
        CHECK(is_compatible(seq, c.structure));
        CHECK(seen.insert(c.structure.arcs()).second);
        CHECK(c.origin_rank >= 0);
        CHECK(c.origin_rank < static_cast<int>(ranking.entries.size()));
    }
}

TEST_CASE("mutate_against_competitors: empty set is a no-op") {
    Structure target = parse_structure(kHairpin10);
    Sequence seq = "GGGAAAACCC";
    Rng rng(5);
    CHECK(mutate_against_competitors(seq, target, CompetitorSet{}, rng) == seq);
}

TEST_CASE("mutate_against_competitors: breaks the competitor pair, keeps the target pair") {
    // target pairs (5, 9); the competitor pairs (5, 10) instead
    Structure target(12, {{5, 9}});
    Structure competitor(12, {{5, 10}});
    Sequence seq = "AAAAGAAACCAA";  // G at 5, C at 9, C at 10
    REQUIRE(is_compatible(seq, target));
    REQUIRE(is_compatible(seq, competitor));

    CompetitorSet comps;
    comps.competitors.push_back(Competitor{competitor, 0, 0});
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        MutationStats stats;
        Sequence out = mutate_against_competitors(seq, target, comps, rng, &stats);
        CHECK(is_compatible(out, target));
        REQUIRE(stats.fallbacks == 0);
        // the new pair at (5, 9) no longer accepts the competitor's partner 10
        CHECK_FALSE(can_pair(out[4], seq[9]));
        // position 10 (unpaired in the target) was pushed away from pairing 5
        CHECK(out[9] != seq[9]);
        CHECK_FALSE(can_pair(out[9], seq[4]));
    }
}

TEST_CASE("mutate_against_competitors: direction invariant on random cases") {
    Rng rng(13);
    ExhaustiveOracle oracle;
    Structure target = parse_structure(kHType18);
    for (int t = 0; t < 40; ++t) {
        Sequence seq = make_start(target, rng);
        FoldRanking ranking = oracle.fold(seq, 20);
        CompetitorSet comps = build_competitors(ranking, seq, target);
        MutationStats stats;
        Sequence out = mutate_against_competitors(seq, target, comps, rng, &stats);
        CHECK(is_compatible(out, target));
        if (stats.fallbacks != 0) continue;
        for (int w = 1; w <= target.n(); ++w) {
            if (target.paired(w) || out[w - 1] == seq[w - 1]) continue;
            for (const Competitor& c : comps.competitors) {
                int v = c.structure.partner(w);
                if (v != 0) CHECK_FALSE(can_pair(out[w - 1], seq[v - 1]));
            }
        }
    }
}

TEST_CASE("adjust_seq: immediate return when the start already folds") {
    ExhaustiveOracle oracle;
    Structure target = parse_structure(kHairpin10);
    SearchParams params = quick_params(1);
    Rng rng(params.rng_seed);
    SearchTrace trace;
    Sequence out = adjust_seq("GGGAAAACCC", target, oracle, params, rng, trace);
    CHECK(out == "GGGAAAACCC");
    CHECK(trace.oracle_calls == 1);
    CHECK(trace.d_min == 0);
}

TEST_CASE("adjust_seq: d_min never increases and never exceeds the start distance") {
    ExhaustiveOracle oracle;
    Structure target = parse_structure(kHType18);
    int improved_or_equal = 0;
    const int seeds = 200;
    for (int seed = 0; seed < seeds; ++seed) {
        SearchParams params = quick_params(static_cast<uint64_t>(seed));
        Rng rng(mix_seed(params.rng_seed, 0));
        SearchTrace trace;
        Sequence start = make_start(target, rng);
        int d_start = structure_distance(oracle.fold(start, 1).mfe(), target);
        adjust_seq(start, target, oracle, params, rng, trace);
        for (size_t h = 1; h < trace.rounds.size(); ++h)
            CHECK(trace.rounds[h].d_min <= trace.rounds[h - 1].d_min);
        if (trace.d_min <= d_start) ++improved_or_equal;
        CHECK(trace.compat_violations == 0);
    }
    CHECK(improved_or_equal >= seeds * 95 / 100);
}

TEST_CASE("local_search: no-op when already solved; final interval means full match") {
    ExhaustiveOracle oracle;
    Structure target = parse_structure(kHairpin10);
    SearchParams params = quick_params(3);
    Rng rng(params.rng_seed);
    SearchTrace trace;
    IntervalPlan plan = decompose_intervals(target);
    Sequence out = local_search("GGGAAAACCC", target, plan, oracle, params, rng, trace);
    CHECK(out == "GGGAAAACCC");

    // a run that ends with restricted distance 0 on I_m folds to the target
    Structure pk = parse_structure(kHType18);
    IntervalPlan pk_plan = decompose_intervals(pk);
    REQUIRE(pk_plan.entries.back().lo == 1);
    REQUIRE(pk_plan.entries.back().hi == pk.n());
    int solved = 0, agree = 0;
    for (int seed = 0; seed < 20; ++seed) {
        Rng r2(mix_seed(11, static_cast<uint64_t>(seed)));
        SearchTrace t2;
        Sequence start = make_start(pk, r2);
        Sequence med = adjust_seq(start, pk, oracle, quick_params(11), r2, t2);
        Sequence fin = local_search(med, pk, pk_plan, oracle, quick_params(11), r2, t2);
        Structure last = restrict_structure(pk, 1, pk.n());
        bool full = oracle.fold(fin, 1).mfe() == pk;
        bool restricted = structure_distance(oracle.fold(fin, 1).mfe(), last) == 0;
        if (full) ++solved;
        if (full == restricted) ++agree;
        CHECK(t2.compat_violations == 0);
    }
    CHECK(agree == 20);
    CHECK(solved >= 1);
}

TEST_CASE("inv: arcless target succeeds for any seed") {
    ExhaustiveOracle oracle;
    Structure target = all_unpaired(8);  // the only canonical structure at n = 8
    for (uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
        Rng rng(seed);
        InvResult res = inv(target, oracle, quick_params(seed), rng);
        CHECK(res.success);
        CHECK(oracle.fold(res.sequence, 1).mfe() == target);
    }
}

TEST_CASE("inv: invalid targets rejected") {
    ExhaustiveOracle oracle;
    SearchParams params = quick_params(1);
    Rng rng(1);
    CHECK_THROWS_AS(inv(Structure(10, {{1, 10}, {3, 8}}), oracle, params, rng), InvalidTarget);
}

TEST_CASE("inv: H-type pseudoknot, repeated seeded trials") {
    ExhaustiveOracle oracle;
    Structure target = parse_structure(kHType18);
    int successes = 0;
    const int seeds = 30;
    for (int seed = 0; seed < seeds; ++seed) {
        Rng rng(mix_seed(4242, static_cast<uint64_t>(seed)));
        InvResult res = inv(target, oracle, quick_params(4242), rng);
        if (res.success) {
            ++successes;
            CHECK(oracle.fold(res.sequence, 1).mfe() == target);
            CHECK(is_compatible(res.sequence, target));
        }
        CHECK(res.trace.compat_violations == 0);
    }
    CHECK(successes >= seeds * 7 / 10);
}

TEST_CASE("inv: deterministic given the seed") {
    ExhaustiveOracle oracle;
    Structure target = parse_structure(kHType18);
    auto run = [&](uint64_t seed) {
        Rng rng(seed);
        return inv(target, oracle, quick_params(seed), rng);
    };
    InvResult a = run(77), b = run(77);
    CHECK(a.success == b.success);
    CHECK(a.sequence == b.sequence);
    CHECK(a.final_distance == b.final_distance);
    REQUIRE(a.trace.rounds.size() == b.trace.rounds.size());
    for (size_t h = 0; h < a.trace.rounds.size(); ++h) {
        CHECK(a.trace.rounds[h].distance == b.trace.rounds[h].distance);
        CHECK(a.trace.rounds[h].competitors == b.trace.rounds[h].competitors);
        CHECK(a.trace.rounds[h].mutations == b.trace.rounds[h].mutations);
    }
    CHECK(a.trace.oracle_calls == b.trace.oracle_calls);
}
