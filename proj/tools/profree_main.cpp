// profree: product-free subsets of finite groups. Construction, exact and
// formula alpha, character degrees, spectral bound checks, and the PSL2(q)
// experiment harness. One JSON document per invocation on stdout;
// diagnostics on stderr. Exit codes: 0 success, 1 invariant violation,
// 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "profree/chartable.hpp"
#include "profree/constructions.hpp"
#include "profree/experiment.hpp"
#include "profree/group.hpp"
#include "profree/groupspec.hpp"
#include "profree/productfree.hpp"
#include "profree/report.hpp"
#include "profree/spectral.hpp"

namespace {

using namespace profree;

std::chrono::milliseconds parse_budget(const std::string& text) {
    std::size_t idx = 0;
    double value = std::stod(text, &idx);
    std::string unit = text.substr(idx);
    if (unit == "ms") return std::chrono::milliseconds(static_cast<std::int64_t>(value));
    if (unit == "m") return std::chrono::milliseconds(static_cast<std::int64_t>(value * 60000));
    if (unit.empty() || unit == "s")
        return std::chrono::milliseconds(static_cast<std::int64_t>(value * 1000));
    throw value_error("unknown budget unit '" + unit + "'");
}

struct Options {
    bool cache = false;
    std::string cache_dir;
    ParsedGroup parse(const std::string& spec) const {
        return parse_groupspec_cached(spec, cache,
                                      cache_dir.empty() ? default_cache_dir() : cache_dir);
    }
};

PermAction action_or_regular(const ParsedGroup& parsed) {
    if (parsed.action) return *parsed.action;
    return regular_action(parsed.group);
}

Json witness_json(const GroupSubset& s) {
    auto v = s.elements();
    return Json::array_of(v.begin(), v.end());
}

void emit(const Json& doc) { std::cout << doc.dump() << "\n"; }

GroupSubset require_product_free(GroupSubset s, const char* what) {
    if (!is_product_free(s))
        throw internal_error(std::string(what) + " produced a non-product-free set");
    return s;
}

int run_group(const Options& opt, const std::string& spec) {
    auto parsed = opt.parse(spec);
    parsed.group->validate();
    if (parsed.action) parsed.action->validate();
    Json doc = Json::object();
    doc.set("label", Json(parsed.group->label()));
    doc.set("n", Json(static_cast<std::int64_t>(parsed.group->order())));
    doc.set("abelian", Json(parsed.group->is_abelian()));
    doc.set("exponent", Json(static_cast<std::int64_t>(parsed.group->exponent())));
    doc.set("action_degree", parsed.action
                                 ? Json(static_cast<std::int64_t>(parsed.action->degree()))
                                 : Json(nullptr));
    if (!parsed.invariant_factors.empty())
        doc.set("invariant_factors", Json::array_of(parsed.invariant_factors.begin(),
                                                    parsed.invariant_factors.end()));
    doc.set("validated", Json(true));
    emit(doc);
    return 0;
}

int run_alpha(const Options& opt, const std::string& spec, const std::string& budget,
              bool formula) {
    auto parsed = opt.parse(spec);
    if (formula && parsed.invariant_factors.empty())
        throw value_error("--formula requires an abelian product of cyclic groups");
    auto res = alpha_exact(parsed.group, parse_budget(budget));
    require_product_free(res.witness, "alpha search");
    Json doc = Json::object();
    doc.set("n", Json(static_cast<std::int64_t>(parsed.group->order())));
    doc.set("alpha", Json(static_cast<std::int64_t>(res.alpha)));
    doc.set("beta", Json(res.beta.value()));
    doc.set("exact", Json(res.exact));
    doc.set("witness", witness_json(res.witness));
    if (formula)
        doc.set("alpha_formula", Json(green_ruzsa_alpha(parsed.invariant_factors)));
    emit(doc);
    return 0;
}

int run_chartable(const Options& opt, const std::string& spec) {
    auto parsed = opt.parse(spec);
    auto cd = character_degrees(*parsed.group);
    Json doc = Json::object();
    doc.set("classes", Json(static_cast<std::int64_t>(cd.classes)));
    doc.set("degrees", Json::array_of(cd.degrees.begin(), cd.degrees.end()));
    doc.set("delta", Json(static_cast<std::int64_t>(cd.delta)));
    emit(doc);
    return 0;
}

int run_construct_babai(const Options& opt, const std::string& spec, int base, int target) {
    auto parsed = opt.parse(spec);
    auto act = action_or_regular(parsed);
    auto s = require_product_free(babai_sos(act, base, target), "coset construction");
    int n = parsed.group->order(), m = act.degree();
    if (act.is_transitive() && s.card() * m != n)
        throw internal_error("fiber size differs from n/m on a transitive action");
    Json doc = Json::object();
    doc.set("construction", Json("babai-sos"));
    doc.set("n", Json(static_cast<std::int64_t>(n)));
    doc.set("m", Json(static_cast<std::int64_t>(m)));
    doc.set("base", Json(static_cast<std::int64_t>(base)));
    doc.set("target", Json(static_cast<std::int64_t>(target)));
    doc.set("size", Json(static_cast<std::int64_t>(s.card())));
    doc.set("witness", witness_json(s));
    emit(doc);
    return 0;
}

int run_construct_kedlaya(const Options& opt, const std::string& spec, int k, int trials,
                          std::uint64_t seed) {
    auto parsed = opt.parse(spec);
    auto act = action_or_regular(parsed);
    if (k <= 0) k = kedlaya_default_k(act.degree());
    auto stats = kedlaya_randomized(act, k, trials, seed);
    require_product_free(stats.best, "randomized construction");
    Json doc = Json::object();
    doc.set("construction", Json("kedlaya"));
    doc.set("n", Json(static_cast<std::int64_t>(parsed.group->order())));
    doc.set("m", Json(static_cast<std::int64_t>(act.degree())));
    doc.set("k", Json(static_cast<std::int64_t>(stats.k)));
    doc.set("trials", Json(static_cast<std::int64_t>(stats.trials)));
    doc.set("seed", Json(stats.seed));
    doc.set("best_size", Json(stats.best_size));
    doc.set("mean_size", Json(stats.mean));
    doc.set("stddev", Json(stats.stddev));
    doc.set("mean_lower_bound",
            Json(static_cast<double>(
                kedlaya_mean_bound(stats.k, parsed.group->order(), act.degree()))));
    doc.set("witness", witness_json(stats.best));
    emit(doc);
    return 0;
}

int run_construct_triple(const Options& opt, const std::string& spec, int u, int v) {
    auto parsed = opt.parse(spec);
    auto act = action_or_regular(parsed);
    int m = act.degree();
    if (u <= 0) u = std::max(1, static_cast<int>(std::sqrt(m / 2.0)));
    if (v <= 0) v = u;
    if (u > m || v > m) throw value_error("u and v may not exceed the degree");
    std::vector<int> upts(u), vpts(v);
    std::iota(upts.begin(), upts.end(), 0);
    std::iota(vpts.begin(), vpts.end(), 0);
    auto fam = triple_construction(act, TargetSet::of(act, upts), TargetSet::of(act, vpts));
    if (fam.solutions != 0) throw internal_error("triple construction yielded solutions");
    std::int64_t n = parsed.group->order();
    Json doc = Json::object();
    doc.set("construction", Json("triple"));
    doc.set("n", Json(n));
    doc.set("m", Json(static_cast<std::int64_t>(m)));
    doc.set("u", Json(static_cast<std::int64_t>(u)));
    doc.set("v", Json(static_cast<std::int64_t>(v)));
    doc.set("size_a", Json(static_cast<std::int64_t>(fam.a.card())));
    doc.set("size_b", Json(static_cast<std::int64_t>(fam.b.card())));
    doc.set("size_c", Json(static_cast<std::int64_t>(fam.c.card())));
    doc.set("solutions", Json(fam.solutions));
    doc.set("product", Json(fam.product));
    double guarantee = (static_cast<double>(n) * n * n / m) *
                       (static_cast<double>(u) * v / m) *
                       (1.0 - static_cast<double>(u) * v / m);
    doc.set("product_guarantee", Json(guarantee));
    doc.set("a", witness_json(fam.a));
    doc.set("b", witness_json(fam.b));
    doc.set("c", witness_json(fam.c));
    emit(doc);
    return 0;
}

GroupSubset load_set_file(const GroupPtr& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw value_error("cannot open set file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw value_error("cannot parse set file: " + std::string(e.what()));
    }
    const nlohmann::json* arr = &doc;
    if (doc.is_object()) {
        if (!doc.contains("witness")) throw value_error("set file has no witness field");
        arr = &doc["witness"];
    }
    std::vector<int> elems;
    for (const auto& x : *arr) elems.push_back(x.get<int>());
    return GroupSubset::of(g, elems);
}

int run_spectrum(const Options& opt, const std::string& spec, const std::string& set_file,
                 bool use_babai, int random_size, std::uint64_t seed, int top) {
    auto parsed = opt.parse(spec);
    const GroupPtr& g = parsed.group;
    GroupSubset a(g);
    bool seeded = false;
    if (!set_file.empty()) {
        a = load_set_file(g, set_file);
    } else if (use_babai) {
        a = babai_sos(action_or_regular(parsed), 0, 1);
    } else if (random_size > 0) {
        if (random_size > g->order()) throw value_error("set size exceeds the group order");
        Rng rng(seed);
        while (a.card() < random_size) a.add(rng.int_below(g->order()));
        seeded = true;
    } else {
        throw value_error("choose a set: --set-file, --babai-sos, or --random-size");
    }
    if (a.empty()) throw value_error("the chosen set is empty");

    int delta_value = character_degrees(*g).delta;
    auto nmat = cayley_incidence(g, a);
    auto spectrum = singular_spectrum(nmat, top);
    double sigma1 = spectrum.sigma.empty() ? 0.0 : spectrum.sigma[0];
    double sigma2 = spectrum.sigma.size() > 1 ? spectrum.sigma[1] : 0.0;
    double edges = static_cast<double>(g->order()) * a.card();
    Json trace_check(nullptr);
    if (top <= 0) {
        double sumsq = 0.0;
        for (double s : spectrum.sigma) sumsq += s * s;
        trace_check = Json(std::abs(sumsq - edges) / edges);
    }
    double bound = edges / delta_value;
    Json doc = Json::object();
    doc.set("sigma1", Json(sigma1));
    doc.set("sigma2", Json(sigma2));
    doc.set("trace_check", std::move(trace_check));
    doc.set("gowers_bound", Json(bound));
    doc.set("slack", Json(bound - sigma2 * sigma2));
    doc.set("set_size", Json(static_cast<std::int64_t>(a.card())));
    doc.set("delta", Json(static_cast<std::int64_t>(delta_value)));
    if (seeded) doc.set("seed", Json(seed));
    if (sigma2 * sigma2 > bound * (1.0 + 1e-6))
        throw internal_error("second singular value exceeds the representation bound");
    emit(doc);
    return 0;
}

int run_bound(const Options& opt, const std::string& spec) {
    auto parsed = opt.parse(spec);
    int delta_value = character_degrees(*parsed.group).delta;
    auto b = gowers_triple_bound(parsed.group->order(), delta_value);
    Json doc = Json::object();
    doc.set("n", Json(static_cast<std::int64_t>(parsed.group->order())));
    doc.set("delta", Json(static_cast<std::int64_t>(delta_value)));
    doc.set("triple_bound", Json(b.triple_bound));
    doc.set("alpha_upper", Json(b.alpha_upper));
    emit(doc);
    return 0;
}

int run_experiment(int qmax, const std::string& qlist, int trials, std::uint64_t seed,
                   const std::string& out_path, bool omit_timing) {
    std::vector<int> qs;
    if (!qlist.empty()) {
        std::size_t pos = 0;
        while (pos < qlist.size()) {
            std::size_t comma = qlist.find(',', pos);
            if (comma == std::string::npos) comma = qlist.size();
            qs.push_back(std::stoi(qlist.substr(pos, comma - pos)));
            pos = comma + 1;
        }
    } else {
        for (int q : psl2_supported_q())
            if (q <= qmax) qs.push_back(q);
    }
    auto report = run_experiment_psl2(qs, trials, seed, !omit_timing);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::ofstream out(out_path);
    if (!out) throw value_error("cannot open output path " + out_path);
    out << experiment_csv(report);
    out.close();
    emit(experiment_json(report));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"product-free subsets of finite groups"};
    app.require_subcommand(1);
    app.fallthrough();  // let --cache / --cache-dir appear after the subcommand

    Options opt;
    app.add_flag("--cache", opt.cache, "cache Cayley tables keyed by the group spec");
    app.add_option("--cache-dir", opt.cache_dir,
                   "cache directory (default: PROFREE_CACHE_DIR or ./.profree-cache)");

    std::string spec, budget = "60s", set_file, qlist, out_path = "psl2_experiment.csv";
    bool formula = false, use_babai = false, omit_timing = false;
    int base = 0, target = 1, k = 0, trials = 1000, u = 0, v = 0;
    int random_size = 0, top = 2, qmax = 19;
    std::uint64_t seed = 0;

    auto* group_cmd = app.add_subcommand("group", "construct and validate a group");
    group_cmd->add_option("spec", spec)->required();

    auto* alpha_cmd = app.add_subcommand("alpha", "maximum product-free subset");
    alpha_cmd->add_option("spec", spec)->required();
    alpha_cmd->add_option("--budget", budget, "search budget, e.g. 60s, 500ms, 2m");
    alpha_cmd->add_flag("--formula", formula, "also evaluate the abelian formula");

    auto* chartable_cmd = app.add_subcommand("chartable", "irreducible character degrees");
    chartable_cmd->add_option("spec", spec)->required();

    auto* construct_cmd = app.add_subcommand("construct", "product-free constructions");
    construct_cmd->require_subcommand(1);
    auto* cb = construct_cmd->add_subcommand("babai-sos", "coset construction");
    cb->add_option("spec", spec)->required();
    cb->add_option("--base", base, "moved point (default 0)");
    cb->add_option("--target", target, "image point (default 1)");
    auto* ck = construct_cmd->add_subcommand("kedlaya", "randomized target-set construction");
    ck->add_option("spec", spec)->required();
    ck->add_option("--k", k, "target set size (default ~sqrt(m/3))");
    ck->add_option("--trials", trials);
    ck->add_option("--seed", seed);
    auto* ct = construct_cmd->add_subcommand("triple", "solution-free triple family");
    ct->add_option("spec", spec)->required();
    ct->add_option("--u", u);
    ct->add_option("--v", v);

    auto* spectrum_cmd = app.add_subcommand("spectrum", "singular values and the lambda bound");
    spectrum_cmd->add_option("spec", spec)->required();
    spectrum_cmd->add_option("--set-file", set_file, "JSON element list or witness object");
    spectrum_cmd->add_flag("--babai-sos", use_babai, "use the coset construction as the set");
    spectrum_cmd->add_option("--random-size", random_size, "use a seeded random set");
    spectrum_cmd->add_option("--seed", seed);
    spectrum_cmd->add_option("--top", top, "0 = full spectrum, 1 or 2 = power iteration");

    auto* bound_cmd = app.add_subcommand("bound", "n^3/delta and the alpha upper bound");
    bound_cmd->add_option("spec", spec)->required();

    auto* experiment_cmd = app.add_subcommand("experiment", "parameter sweeps");
    auto* psl2_cmd = experiment_cmd->add_subcommand("psl2", "PSL2(q) sweep");
    psl2_cmd->add_option("--qmax", qmax, "largest q to include");
    psl2_cmd->add_option("--qlist", qlist, "comma-separated q values (overrides qmax)");
    psl2_cmd->add_option("--trials", trials);
    psl2_cmd->add_option("--seed", seed);
    psl2_cmd->add_option("--out", out_path, "CSV output path");
    psl2_cmd->add_flag("--omit-timing", omit_timing, "zero the runtime column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (group_cmd->parsed()) return run_group(opt, spec);
        if (alpha_cmd->parsed()) return run_alpha(opt, spec, budget, formula);
        if (chartable_cmd->parsed()) return run_chartable(opt, spec);
        if (construct_cmd->parsed()) {
            if (cb->parsed()) return run_construct_babai(opt, spec, base, target);
            if (ck->parsed()) return run_construct_kedlaya(opt, spec, k, trials, seed);
            if (ct->parsed()) return run_construct_triple(opt, spec, u, v);
        }
        if (spectrum_cmd->parsed())
            return run_spectrum(opt, spec, set_file, use_babai, random_size, seed, top);
        if (bound_cmd->parsed()) return run_bound(opt, spec);
        if (experiment_cmd->parsed() && psl2_cmd->parsed())
            return run_experiment(qmax, qlist, trials, seed, out_path, omit_timing);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const internal_error& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 1;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
