#pragma once

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "profree/errors.hpp"
#include "profree/group.hpp"
#include "profree/report.hpp"

namespace profree {

// A parsed group specification: the group, its natural permutation action
// when one exists, and the invariant factors when the spec names an abelian
// product of cyclic groups.
struct ParsedGroup {
    GroupPtr group;
    std::optional<PermAction> action;
    std::vector<std::int64_t> invariant_factors;
    std::string spec;
};

// Invariant factor chain (each dividing the next) of a product of cyclic
// groups of the given orders.
inline std::vector<std::int64_t> invariant_factors(const std::vector<std::int64_t>& orders) {
    std::map<std::int64_t, std::vector<int>> prime_exponents;
    for (std::int64_t n : orders) {
        if (n < 1) throw value_error("cyclic orders must be positive");
        for (std::int64_t p = 2; p * p <= n; ++p) {
            if (n % p) continue;
            int e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            prime_exponents[p].push_back(e);
        }
        if (n > 1) prime_exponents[n].push_back(1);
    }
    std::size_t ranks = 0;
    for (auto& [p, es] : prime_exponents) {
        std::sort(es.begin(), es.end(), std::greater<int>());
        ranks = std::max(ranks, es.size());
    }
    if (ranks == 0) return {1};  // the trivial group
    std::vector<std::int64_t> chain(ranks, 1);
    for (auto& [p, es] : prime_exponents)
        for (std::size_t r = 0; r < es.size(); ++r) {
            std::int64_t pw = 1;
            for (int i = 0; i < es[r]; ++i) pw *= p;
            chain[r] *= pw;  // chain[0] collects the largest exponents
        }
    std::reverse(chain.begin(), chain.end());
    return chain;
}

namespace detail {

struct AtomSpec {
    enum Kind { kZ, kD, kQ8, kS, kA, kPsl2, kPerm } kind;
    long param = 0;
    std::vector<std::vector<int>> perms;
};

struct SpecParser {
    const std::string& text;
    std::size_t pos = 0;

    explicit SpecParser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!consume(c)) throw parse_error(std::string("expected '") + c + "'", pos);
    }
    long parse_int() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw parse_error("expected a number", pos);
        return std::strtol(text.c_str() + start, nullptr, 10);
    }
    bool try_keyword(const std::string& kw) {
        skip_ws();
        if (text.size() - pos < kw.size()) return false;
        for (std::size_t i = 0; i < kw.size(); ++i)
            if (std::toupper(static_cast<unsigned char>(text[pos + i])) !=
                std::toupper(static_cast<unsigned char>(kw[i])))
                return false;
        pos += kw.size();
        return true;
    }

    AtomSpec parse_atom() {
        skip_ws();
        std::size_t at = pos;
        if (try_keyword("PSL2")) {
            expect('(');
            long q = parse_int();
            expect(')');
            return {AtomSpec::kPsl2, q, {}};
        }
        if (try_keyword("perm:")) {
            AtomSpec atom{AtomSpec::kPerm, 0, parse_perm_list()};
            if (atom.perms.empty()) throw parse_error("permutation list must not be empty", pos);
            return atom;
        }
        if (try_keyword("Q8")) return {AtomSpec::kQ8, 8, {}};
        char c = peek();
        if (c == 'Z' || c == 'z') {
            ++pos;
            return {AtomSpec::kZ, parse_int(), {}};
        }
        if (c == 'D' || c == 'd') {
            ++pos;
            return {AtomSpec::kD, parse_int(), {}};
        }
        if (c == 'S' || c == 's') {
            ++pos;
            return {AtomSpec::kS, parse_int(), {}};
        }
        if (c == 'A' || c == 'a') {
            ++pos;
            return {AtomSpec::kA, parse_int(), {}};
        }
        throw parse_error("unrecognized group atom", at);
    }

    // [(0 1),(0 1 2)]: each parenthesized run is a cycle; juxtaposed cycles
    // compose into a single permutation.
    std::vector<std::vector<int>> parse_perm_list() {
        expect('[');
        std::vector<std::vector<std::vector<int>>> perms;  // perm -> cycles
        int max_point = -1;
        while (true) {
            std::vector<std::vector<int>> cycles;
            while (peek() == '(') {
                expect('(');
                std::vector<int> cycle;
                while (peek() != ')') {
                    long v = parse_int();
                    if (v < 0 || v > 4095) throw parse_error("point out of range", pos);
                    max_point = std::max(max_point, static_cast<int>(v));
                    cycle.push_back(static_cast<int>(v));
                    if (peek() == ',') consume(',');  // tolerate comma-separated points
                }
                expect(')');
                cycles.push_back(std::move(cycle));
            }
            if (cycles.empty()) throw parse_error("expected a cycle", pos);
            perms.push_back(std::move(cycles));
            if (consume(',')) continue;
            break;
        }
        expect(']');
        int m = max_point + 1;
        std::vector<std::vector<int>> gens;
        for (const auto& cycles : perms) {
            std::vector<int> perm(m);
            for (int i = 0; i < m; ++i) perm[i] = i;
            // rightmost cycle acts first
            for (auto it = cycles.rbegin(); it != cycles.rend(); ++it) {
                const auto& cyc = *it;
                std::vector<int> step(m);
                for (int i = 0; i < m; ++i) step[i] = i;
                for (std::size_t i = 0; i < cyc.size(); ++i)
                    step[cyc[i]] = cyc[(i + 1) % cyc.size()];
                for (int i = 0; i < m; ++i) perm[i] = step[perm[i]];
            }
            gens.push_back(std::move(perm));
        }
        return gens;
    }
};

inline std::vector<AtomSpec> parse_spec_ast(const std::string& text) {
    SpecParser parser(text);
    std::vector<AtomSpec> atoms;
    atoms.push_back(parser.parse_atom());
    while (!parser.eof()) {
        parser.skip_ws();
        char c = parser.text[parser.pos];
        if (c == 'x' || c == 'X') {
            ++parser.pos;
            atoms.push_back(parser.parse_atom());
        } else {
            throw parse_error("unexpected trailing input", parser.pos);
        }
    }
    return atoms;
}

inline GroupFamily ast_family(const std::vector<AtomSpec>& atoms) {
    if (atoms.size() != 1) return {};
    const AtomSpec& a = atoms[0];
    switch (a.kind) {
        case AtomSpec::kZ: return {GroupFamily::kCyclic, static_cast<int>(a.param)};
        case AtomSpec::kD: return {GroupFamily::kDihedral, static_cast<int>(a.param)};
        case AtomSpec::kQ8: return {GroupFamily::kQuaternion, 8};
        case AtomSpec::kS: return {GroupFamily::kSymmetric, static_cast<int>(a.param)};
        case AtomSpec::kA: return {GroupFamily::kAlternating, static_cast<int>(a.param)};
        case AtomSpec::kPsl2: return {GroupFamily::kPsl2, static_cast<int>(a.param)};
        case AtomSpec::kPerm: return {};
    }
    return {};
}

inline std::vector<std::int64_t> ast_invariant_factors(const std::vector<AtomSpec>& atoms) {
    std::vector<std::int64_t> orders;
    for (const auto& a : atoms) {
        if (a.kind != AtomSpec::kZ) return {};
        orders.push_back(a.param);
    }
    return invariant_factors(orders);
}

inline ParsedGroup build_from_ast(const std::vector<AtomSpec>& atoms,
                                  const std::string& text) {
    ParsedGroup result;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        GroupPtr g;
        std::optional<PermAction> action;
        const AtomSpec& a = atoms[i];
        switch (a.kind) {
            case AtomSpec::kZ: g = build_cyclic(static_cast<int>(a.param)); break;
            case AtomSpec::kQ8: g = build_quaternion8(); break;
            case AtomSpec::kD: {
                auto built = build_dihedral(static_cast<int>(a.param));
                g = built.group;
                action = std::move(built.action);
                break;
            }
            case AtomSpec::kS: {
                auto built = build_symmetric(static_cast<int>(a.param));
                g = built.group;
                action = std::move(built.action);
                break;
            }
            case AtomSpec::kA: {
                auto built = build_alternating(static_cast<int>(a.param));
                g = built.group;
                action = std::move(built.action);
                break;
            }
            case AtomSpec::kPsl2: {
                auto built = build_psl2(static_cast<int>(a.param));
                g = built.group;
                action = std::move(built.action);
                break;
            }
            case AtomSpec::kPerm: {
                auto built = build_from_generators(a.perms);
                g = built.group;
                action = std::move(built.action);
                break;
            }
        }
        if (i == 0) {
            result.group = std::move(g);
            result.action = std::move(action);
        } else {
            result.group = direct_product(result.group, g);
            result.action.reset();  // products carry no natural action
        }
    }
    result.invariant_factors =
        result.group->is_abelian() ? ast_invariant_factors(atoms) : std::vector<std::int64_t>{};
    result.spec = text;
    return result;
}

} // namespace detail

// Parses the group mini-language: "Z12", "Z2xZ4xZ3", "D8", "Q8", "S5", "A5",
// "PSL2(7)", "perm:[(0 1),(0 1 2)]". Atoms may be joined with 'x' into
// direct products.
inline ParsedGroup parse_groupspec(const std::string& text) {
    return detail::build_from_ast(detail::parse_spec_ast(text), text);
}

// ---------------------------------------------------------------------------
// Cayley table cache

inline std::string default_cache_dir() {
    if (const char* env = std::getenv("PROFREE_CACHE_DIR")) return env;
    return ".profree-cache";
}

inline std::string cache_key(const std::string& spec) {
    std::string key;
    for (char c : spec)
        key.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    std::uint64_t h = 1469598103934665603ull;
    for (char c : spec) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "-%016llx", static_cast<unsigned long long>(h));
    return key + buf;
}

inline void save_group_cache(const std::string& dir, const std::string& spec,
                             const ParsedGroup& parsed) {
    std::filesystem::create_directories(dir);
    const Group& g = *parsed.group;
    Json mul = Json::array();
    for (int a = 0; a < g.order(); ++a) {
        Json row = Json::array();
        for (int b = 0; b < g.order(); ++b)
            row.push(Json(static_cast<std::int64_t>(g.mul(a, b))));
        mul.push(std::move(row));
    }
    Json doc = Json::object();
    doc.set("n", Json(static_cast<std::int64_t>(g.order())));
    doc.set("label", Json(g.label()));
    doc.set("mul", std::move(mul));
    std::ofstream out(dir + "/" + cache_key(spec) + ".json");
    out << doc.dump() << "\n";

    if (parsed.action) {
        const PermAction& act = *parsed.action;
        Json table = Json::array();
        for (int x = 0; x < g.order(); ++x) {
            Json row = Json::array();
            for (int p = 0; p < act.degree(); ++p)
                row.push(Json(static_cast<std::int64_t>(act.apply(x, p))));
            table.push(std::move(row));
        }
        Json adoc = Json::object();
        adoc.set("m", Json(static_cast<std::int64_t>(act.degree())));
        adoc.set("act", std::move(table));
        std::ofstream aout(dir + "/" + cache_key(spec) + ".action.json");
        aout << adoc.dump() << "\n";
    }
}

// Loads a cached group (and its action sidecar, if present) and re-validates
// every table invariant before returning it.
inline std::optional<ParsedGroup> load_group_cache(const std::string& dir,
                                                   const std::string& spec,
                                                   GroupFamily family = {}) {
    std::string base = dir + "/" + cache_key(spec);
    std::ifstream in(base + ".json");
    if (!in) return std::nullopt;
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
    if (!doc.contains("n") || !doc.contains("mul") || !doc.contains("label"))
        return std::nullopt;
    int n = doc["n"].get<int>();
    std::vector<std::int32_t> table;
    table.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& row : doc["mul"])
        for (const auto& v : row) table.push_back(v.get<std::int32_t>());
    auto group = std::make_shared<Group>(n, std::move(table),
                                         doc["label"].get<std::string>(), family);
    group->validate();

    ParsedGroup parsed{group, std::nullopt, {}, spec};
    std::ifstream ain(base + ".action.json");
    if (ain) {
        nlohmann::json adoc;
        try {
            ain >> adoc;
            int m = adoc["m"].get<int>();
            std::vector<std::int32_t> act;
            act.reserve(static_cast<std::size_t>(n) * m);
            for (const auto& row : adoc["act"])
                for (const auto& v : row) act.push_back(v.get<std::int32_t>());
            PermAction action(group, m, std::move(act));
            action.validate();
            parsed.action = std::move(action);
        } catch (const nlohmann::json::exception&) {
            // broken action sidecar: ignore it, the Cayley table is intact
        }
    }
    return parsed;
}

// Cache-aware parse keyed by the spec string. Hits skip group construction
// but re-validate all invariants; misses construct and fill the cache.
inline ParsedGroup parse_groupspec_cached(const std::string& text, bool use_cache,
                                          const std::string& dir) {
    if (!use_cache) return parse_groupspec(text);
    auto atoms = detail::parse_spec_ast(text);
    auto cached = load_group_cache(dir, text, detail::ast_family(atoms));
    if (cached) {
        cached->invariant_factors = cached->group->is_abelian()
                                        ? detail::ast_invariant_factors(atoms)
                                        : std::vector<std::int64_t>{};
        return *cached;
    }
    ParsedGroup fresh = detail::build_from_ast(atoms, text);
    save_group_cache(dir, text, fresh);
    return fresh;
}

} // namespace profree
