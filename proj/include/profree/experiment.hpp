#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "profree/chartable.hpp"
#include "profree/constructions.hpp"
#include "profree/group.hpp"
#include "profree/productfree.hpp"
#include "profree/report.hpp"
#include "profree/spectral.hpp"

namespace profree {

// One PSL2(q) sweep row. Lower bounds come from the two constructions, upper
// bounds from the representation-theoretic triple bound.
struct ExperimentRow {
    int q = 0;
    int n = 0;
    int m = 0;
    int delta = 0;
    std::int64_t alpha_lower_babai_sos = 0;
    std::int64_t alpha_lower_kedlaya_best = 0;
    double alpha_lower_kedlaya_mean = 0.0;
    double gowers_alpha_upper = 0.0;
    std::int64_t triple_product_lower = 0;
    double triple_product_upper = 0.0;  // n^3 / delta
    std::uint64_t seed = 0;
    std::int64_t runtime_ms = 0;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
    std::vector<std::string> warnings;
    int trials = 0;
    std::uint64_t seed = 0;
};

inline const std::vector<int>& psl2_supported_q() {
    static const std::vector<int> qs = {5, 7, 11, 13, 17, 19};
    return qs;
}

// Runs the whole pipeline for each q: group construction, Dixon delta, both
// product-free constructions (every witness re-verified by the checker), and
// the solution-free triple family. Deterministic for a fixed seed; rows come
// out ordered by q.
inline ExperimentReport run_experiment_psl2(const std::vector<int>& q_list, int trials,
                                            std::uint64_t seed, bool with_timing = true) {
    ExperimentReport report;
    report.trials = trials;
    report.seed = seed;

    std::set<int> qs(q_list.begin(), q_list.end());
    for (int q : qs) {
        if (std::find(psl2_supported_q().begin(), psl2_supported_q().end(), q) ==
            psl2_supported_q().end()) {
            report.warnings.push_back("skipping unsupported q=" + std::to_string(q));
            continue;
        }
        auto t0 = std::chrono::steady_clock::now();
        auto built = build_psl2(q);
        const GroupPtr& g = built.group;
        const PermAction& act = built.action;
        ExperimentRow row;
        row.q = q;
        row.n = g->order();
        row.m = act.degree();
        row.seed = seed;
        row.delta = character_degrees(*g).delta;

        auto coset = babai_sos(act, 0, 1);
        if (!is_product_free(coset))
            throw internal_error("coset construction produced a non-product-free set");
        if (coset.card() * row.m != row.n)
            throw internal_error("coset construction has the wrong size");
        row.alpha_lower_babai_sos = coset.card();

        int k = kedlaya_default_k(row.m);
        std::uint64_t row_seed = Rng::stream(seed, static_cast<std::uint64_t>(q)).next();
        auto stats = kedlaya_randomized(act, k, trials, row_seed);
        if (!is_product_free(stats.best))
            throw internal_error("randomized construction produced a non-product-free set");
        row.alpha_lower_kedlaya_best = stats.best_size;
        row.alpha_lower_kedlaya_mean = stats.mean;

        row.gowers_alpha_upper = gowers_triple_bound(row.n, row.delta).alpha_upper;
        std::int64_t n3 = static_cast<std::int64_t>(row.n) * row.n * row.n;
        row.triple_product_upper = static_cast<double>(n3) / row.delta;

        int uv = std::max(1, static_cast<int>(std::sqrt(row.m / 2.0)));
        std::vector<int> pts(uv);
        std::iota(pts.begin(), pts.end(), 0);
        auto u = TargetSet::of(act, pts);
        auto triple = triple_construction(act, u, u);
        if (triple.solutions != 0)
            throw internal_error("triple construction yielded solutions");
        row.triple_product_lower = triple.product;

        // cross-bound sanity: lower bounds may not exceed the upper bounds
        auto cube_ok = [&](std::int64_t size) {
            return size * size * size * row.delta <= n3;
        };
        if (!cube_ok(row.alpha_lower_babai_sos) || !cube_ok(row.alpha_lower_kedlaya_best))
            throw internal_error("a product-free witness exceeds the alpha upper bound");
        if (triple.product * row.delta > n3)
            throw internal_error("triple family exceeds the product upper bound");

        auto elapsed = std::chrono::steady_clock::now() - t0;
        row.runtime_ms =
            with_timing
                ? std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()
                : 0;
        report.rows.push_back(row);
    }
    return report;
}

inline const std::vector<std::string>& experiment_columns() {
    static const std::vector<std::string> cols = {
        "q", "n", "m", "delta", "alpha_lower_babai_sos", "alpha_lower_kedlaya_best",
        "alpha_lower_kedlaya_mean", "gowers_alpha_upper", "triple_product_lower",
        "triple_product_upper", "seed", "runtime_ms"};
    return cols;
}

inline std::string experiment_csv(const ExperimentReport& report) {
    std::string out = csv_line(experiment_columns());
    for (const auto& r : report.rows) {
        out += csv_line({std::to_string(r.q), std::to_string(r.n), std::to_string(r.m),
                         std::to_string(r.delta), std::to_string(r.alpha_lower_babai_sos),
                         std::to_string(r.alpha_lower_kedlaya_best),
                         format_double(r.alpha_lower_kedlaya_mean),
                         format_double(r.gowers_alpha_upper),
                         std::to_string(r.triple_product_lower),
                         format_double(r.triple_product_upper), std::to_string(r.seed),
                         std::to_string(r.runtime_ms)});
    }
    return out;
}

inline Json experiment_row_json(const ExperimentRow& r) {
    Json row = Json::object();
    row.set("q", Json(static_cast<std::int64_t>(r.q)));
    row.set("n", Json(static_cast<std::int64_t>(r.n)));
    row.set("m", Json(static_cast<std::int64_t>(r.m)));
    row.set("delta", Json(static_cast<std::int64_t>(r.delta)));
    row.set("alpha_lower_babai_sos", Json(r.alpha_lower_babai_sos));
    row.set("alpha_lower_kedlaya_best", Json(r.alpha_lower_kedlaya_best));
    row.set("alpha_lower_kedlaya_mean", Json(r.alpha_lower_kedlaya_mean));
    row.set("gowers_alpha_upper", Json(r.gowers_alpha_upper));
    row.set("triple_product_lower", Json(r.triple_product_lower));
    row.set("triple_product_upper", Json(r.triple_product_upper));
    row.set("seed", Json(r.seed));
    row.set("runtime_ms", Json(r.runtime_ms));
    return row;
}

inline Json experiment_json(const ExperimentReport& report) {
    Json rows = Json::array();
    for (const auto& r : report.rows) rows.push(experiment_row_json(r));
    Json warnings = Json::array();
    for (const auto& w : report.warnings) warnings.push(Json(w));
    Json doc = Json::object();
    doc.set("experiment", Json("psl2"));
    doc.set("seed", Json(report.seed));
    doc.set("trials", Json(static_cast<std::int64_t>(report.trials)));
    doc.set("rows", std::move(rows));
    doc.set("warnings", std::move(warnings));
    return doc;
}

} // namespace profree
