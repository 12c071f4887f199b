#include "crum/error.hpp"
#include "crum/oqm/chain.hpp"
#include "crum/verify/suite.hpp"

#include <doctest.h>

#include <cstdlib>
#include <set>

using namespace crum;
using namespace crum::verify;
using nlohmann::json;

namespace {

RunConfig config(const std::string& family, const std::string& params, int depth, int nmax) {
    RunConfig c;
    c.family = family;
    if (!params.empty()) {
        size_t start = 0;
        while (start < params.size()) {
            size_t end = params.find(' ', start);
            if (end == std::string::npos) {
                end = params.size();
            }
            c.params.assign(params.substr(start, end - start));
            start = end + 1;
        }
    }
    c.depth = depth;
    c.nmax = nmax;
    return c;
}

} // namespace

TEST_CASE("sampler") {
    const Interval w{-2.0, 6.0};
    const auto a = real_samples(w, 50, 7);
    CHECK(a.size() == 50);
    for (double x : a) {
        CHECK(x >= -1.6);
        CHECK(x <= 5.6);
    }
    CHECK(a == real_samples(w, 50, 7));
    CHECK(a != real_samples(w, 50, 8));
    // low discrepancy: every tenth of the range is hit
    std::set<int> bins;
    for (double x : a) {
        bins.insert(static_cast<int>((x + 1.6) / 0.72));
    }
    CHECK(bins.size() == 10);

    const auto fam = make_dqm_family("q_hermite", ParamSet{{"q", 0.5}});
    const auto xs = strip_samples(*fam, 10, 3);
    CHECK(xs.size() == 30);
    std::set<double> lines;
    for (cplx x : xs) {
        lines.insert(x.imag());
    }
    CHECK(lines.size() == 5);
    CHECK(lines.count(fam->gamma()) == 1);
    CHECK(lines.count(-0.5 * fam->gamma()) == 1);
}

TEST_CASE("run config round trip and seed override") {
    RunConfig c = config("askey_wilson", "a=(0.3,-0.2,0.1+0.2i,0.1-0.2i) q=0.6", 2, 5);
    c.tolerances.overrides["intertwine"] = 1e-6;
    c.seed = 99;
    c.limits = true;
    c.out = "r.json";
    const json j = c.to_json();
    CHECK(RunConfig::from_json(j).to_json() == j);
    CHECK(RunConfig::from_json(json::parse(j.dump())).to_json() == j);
    CHECK(c.tolerances.get("intertwine", 1.0) == 1e-6);
    CHECK(c.tolerances.get("eigen", 1.0) == 1.0);
    CHECK(c.tolerances.get("si_spectrum", 1.0) == 1e-10);

    ::setenv("CRUM_SEED", "1234", 1);
    apply_env(c);
    CHECK(c.seed == 1234);
    ::setenv("CRUM_SEED", "x", 1);
    CHECK_THROWS_AS(apply_env(c), ParameterError);
    ::unsetenv("CRUM_SEED");

    CHECK_THROWS_AS(RunConfig::from_json(json{{"depth", 2}}), ParameterError);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"family", "hermite"}, {"precision", "quad"}}), ParameterError);
}

TEST_CASE("suite on hermite is total and passes") {
    const json r = run_suite(config("hermite", "", 3, 6));
    CHECK(r["schema"] == "crum-report/1");
    CHECK(r["status"] == "pass");
    REQUIRE(r["levels"].size() == 4);
    for (const auto& lv : r["levels"]) {
        CHECK(lv["identities"].size() == 8);
        for (const auto& [name, e] : lv["identities"].items()) {
            CAPTURE(name);
            CHECK((e.contains("skipped") || e.contains("residual")));
            if (e.contains("residual")) {
                CHECK(e["checked"] == "at-samples");
                CHECK(e["pass"] == true);
            }
        }
        CHECK(lv["gram"]["pass"] == true);
    }
    CHECK(r["levels"][0]["identities"]["riccati"].contains("skipped"));
    CHECK(r["levels"][3]["identities"]["intertwine"].contains("skipped"));
    CHECK(r["oracle"]["spectrum"]["pass"] == true);
    CHECK(r["oracle"]["iso_spectral"]["pass"] == true);
    CHECK(r["virtual_state"]["norm_diverges"] == true);
    CHECK(r["shape_invariance"]["kappa"].get<double>() == doctest::Approx(1.0));
    CHECK(r["eta"].contains("skipped"));
}

TEST_CASE("suite on q-Hermite passes and is deterministic") {
    const RunConfig c = config("q_hermite", "q=0.5", 2, 5);
    const json a = run_suite(c);
    CHECK(a["status"] == "pass");
    CHECK(a["levels"][1]["identities"].size() == 12);
    CHECK(a["eta"]["Vs_product"]["pass"] == true);
    CHECK(a["oracle"].contains("skipped"));
    CHECK(a["sampling"]["lines"].size() == 4);
    CHECK(strip_timing(a).dump() == strip_timing(run_suite(c)).dump());
    RunConfig other = c;
    other.seed = 2;
    CHECK(strip_timing(a).dump() != strip_timing(run_suite(other)).dump());
}

TEST_CASE("failures become report entries") {
    SUBCASE("broken Askey-Wilson parameters") {
        const json r = run_suite(config("askey_wilson", "a=(0.3,-0.2,0.1+0.2i,0.1+0.2i) q=0.6", 2, 5));
        CHECK(r["status"] == "fail");
        REQUIRE(r["stages"].size() == 1);
        CHECK(r["stages"][0]["name"] == "construction");
        CHECK(r["stages"][0]["error"] == "ParameterError");
        CHECK(r["stages"][0]["message"].get<std::string>().find("as a set") != std::string::npos);
    }
    SUBCASE("a tolerance that cannot be met") {
        RunConfig c = config("hermite", "", 1, 3);
        c.tolerances.overrides["eigen"] = 0.0;
        c.tolerances.overrides["zero_mode"] = -1.0;
        const json r = run_suite(c);
        CHECK(r["status"] == "fail");
        CHECK(r["levels"][0]["identities"]["zero_mode"]["pass"] == false);
    }
    SUBCASE("unsupported requests throw") {
        RunConfig c = config("hermite", "", 1, 3);
        c.precision = Precision::extended;
        CHECK_THROWS_AS(run_suite(c), CapabilityError);
        CHECK_THROWS_AS(run_suite(config("hermite", "", 6, 8)), CapabilityError);
        CHECK_THROWS_AS(run_suite(config("hermite", "", 3, 2)), IndexError);
    }
}

TEST_CASE("deep chains near a singular edge do not break") {
    for (double g : {1.1, 1.3, 1.6}) {
        for (const char* name : {"laguerre", "jacobi"}) {
            CAPTURE(name);
            CAPTURE(g);
            const auto fam = make_oqm_family(name, ParamSet{{"g", g}});
            CHECK_NOTHROW(oqm::build_chain(fam, 4, 6));
            CHECK(oqm::edge_cut(*fam, 0) == 0.0);
            CHECK(oqm::edge_cut(*fam, 4) < 0.05);
        }
    }
}
