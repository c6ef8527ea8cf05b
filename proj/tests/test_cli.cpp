#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef PROFREE_BIN
#define PROFREE_BIN "profree"
#endif

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(PROFREE_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

nlohmann::json run_json(const std::string& args) {
    auto res = run(args);
    REQUIRE(res.exit_code == 0);
    return nlohmann::json::parse(res.out);
}

} // namespace

TEST_CASE("cli group") {
    auto doc = run_json("group Z12");
    REQUIRE(doc["n"] == 12);
    REQUIRE(doc["abelian"] == true);
    REQUIRE(doc["exponent"] == 12);
    REQUIRE(doc["validated"] == true);
}

TEST_CASE("cli alpha") {
    auto doc = run_json("alpha Z7");
    REQUIRE(doc["n"] == 7);
    REQUIRE(doc["alpha"] == 2);
    REQUIRE(doc["exact"] == true);
    REQUIRE(doc["witness"] == nlohmann::json::array({1, 3}));

    auto formula = run_json("alpha Z2xZ4 --formula");
    REQUIRE(formula["alpha"] == 4);
    REQUIRE(formula["alpha_formula"] == 4);

    // --formula on a nonabelian spec is a usage error
    REQUIRE(run("alpha S4 --formula").exit_code == 2);
}

TEST_CASE("cli chartable") {
    auto doc = run_json("chartable 'PSL2(7)'");
    REQUIRE(doc["classes"] == 6);
    REQUIRE(doc["degrees"] == nlohmann::json::array({1, 3, 3, 6, 7, 8}));
    REQUIRE(doc["delta"] == 3);
}

TEST_CASE("cli constructions") {
    auto babai = run_json("construct babai-sos S5");
    REQUIRE(babai["size"] == 24);  // 120/5
    REQUIRE(babai["m"] == 5);

    auto kedlaya = run_json("construct kedlaya 'PSL2(13)' --trials 100 --seed 7");
    REQUIRE(kedlaya["k"] == 2);
    REQUIRE(kedlaya["seed"] == 7);
    REQUIRE(kedlaya["best_size"].get<int>() > 0);

    auto triple = run_json("construct triple 'PSL2(7)'");
    REQUIRE(triple["solutions"] == 0);
    REQUIRE(triple["size_b"] == 42);
    REQUIRE(triple["size_c"] == 42);
    REQUIRE(triple["u"] == 2);
}

TEST_CASE("cli determinism") {
    auto a = run("construct kedlaya 'PSL2(13)' --trials 200 --seed 11");
    auto b = run("construct kedlaya 'PSL2(13)' --trials 200 --seed 11");
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);

    auto c = run("alpha Z12");
    auto d = run("alpha Z12");
    REQUIRE(c.out == d.out);
}

TEST_CASE("cli spectrum consumes witness files") {
    auto tmp = std::filesystem::temp_directory_path() / "profree-witness.json";
    {
        auto alpha = run("alpha S4");
        REQUIRE(alpha.exit_code == 0);
        std::ofstream out(tmp);
        out << alpha.out;
    }
    auto doc = run_json("spectrum S4 --set-file " + tmp.string() + " --top 0");
    REQUIRE(doc["sigma1"].get<double>() == Catch::Approx(doc["set_size"].get<double>()));
    REQUIRE(doc["slack"].get<double>() >= 0.0);
    REQUIRE(doc["trace_check"].get<double>() <= 1e-6);
    std::filesystem::remove(tmp);

    auto rnd = run_json("spectrum 'PSL2(5)' --random-size 20 --seed 5");
    REQUIRE(rnd["seed"] == 5);
    REQUIRE(rnd["sigma1"].get<double>() == Catch::Approx(20.0).margin(1e-6));
}

TEST_CASE("cli bound") {
    auto doc = run_json("bound Z12");
    REQUIRE(doc["delta"] == 1);
    REQUIRE(doc["alpha_upper"].get<double>() == Catch::Approx(12.0));
}

TEST_CASE("cli experiment") {
    auto csv_path = std::filesystem::temp_directory_path() / "profree-psl2.csv";
    std::string cmd = "experiment psl2 --qlist 5 --trials 20 --seed 3 --out " +
                      csv_path.string() + " --omit-timing";
    auto first = run(cmd);
    REQUIRE(first.exit_code == 0);
    auto doc = nlohmann::json::parse(first.out);
    REQUIRE(doc["rows"].size() == 1);
    REQUIRE(doc["rows"][0]["q"] == 5);
    REQUIRE(doc["rows"][0]["delta"] == 3);

    std::ifstream in(csv_path);
    std::string header;
    std::getline(in, header);
    REQUIRE(header ==
            "q,n,m,delta,alpha_lower_babai_sos,alpha_lower_kedlaya_best,"
            "alpha_lower_kedlaya_mean,gowers_alpha_upper,triple_product_lower,"
            "triple_product_upper,seed,runtime_ms");
    in.close();

    // byte-identical reruns (stdout and the CSV) with timing suppressed
    auto again = run(cmd);
    REQUIRE(again.out == first.out);
    std::ifstream in2(csv_path);
    std::string csv2((std::istreambuf_iterator<char>(in2)),
                     std::istreambuf_iterator<char>());
    REQUIRE(csv2.find(header) == 0);
    std::filesystem::remove(csv_path);
}

TEST_CASE("cli cache") {
    auto dir = std::filesystem::temp_directory_path() / "profree-cli-cache";
    std::filesystem::remove_all(dir);
    std::string flags = " --cache --cache-dir " + dir.string();
    auto first = run("group 'PSL2(5)'" + flags);
    REQUIRE(first.exit_code == 0);
    REQUIRE(std::filesystem::exists(dir));
    auto second = run("group 'PSL2(5)'" + flags);
    REQUIRE(second.out == first.out);
    // cached groups feed the other commands too
    auto alpha = run("alpha Z12" + flags);
    auto alpha2 = run("alpha Z12" + flags);
    REQUIRE(alpha.out == alpha2.out);
    std::filesystem::remove_all(dir);
}

TEST_CASE("cli exit codes") {
    REQUIRE(run("alpha W5").exit_code == 2);
    REQUIRE(run("group Z0").exit_code == 2);
    REQUIRE(run("group Z5000").exit_code == 2);
    REQUIRE(run("chartable").exit_code == 2);
    REQUIRE(run("--help").exit_code == 0);
    REQUIRE(run("spectrum Z6").exit_code == 2);  // no set chosen
}

TEST_CASE("cli rejects a corrupted cache with an invariant failure") {
    auto dir = std::filesystem::temp_directory_path() / "profree-corrupt-cache";
    std::filesystem::remove_all(dir);
    std::string flags = " --cache --cache-dir " + dir.string();
    REQUIRE(run("group Z6" + flags).exit_code == 0);

    // damage the cached table without breaking the JSON or the identity row
    std::filesystem::path file;
    for (const auto& e : std::filesystem::directory_iterator(dir)) file = e.path();
    std::ifstream in(file);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    auto pos = text.rfind("[5,0,1,2,3,4]");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 13, "[5,0,1,2,3,3]");
    std::ofstream out(file);
    out << text;
    out.close();

    REQUIRE(run("group Z6" + flags).exit_code == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("cli cache honors the environment variable") {
    auto dir = std::filesystem::temp_directory_path() / "profree-env-cache";
    std::filesystem::remove_all(dir);
    std::string cmd = "PROFREE_CACHE_DIR=" + dir.string() + " " + PROFREE_BIN +
                      " group Z8 --cache 2>/dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    REQUIRE(std::filesystem::exists(dir));
    std::filesystem::remove_all(dir);
}
