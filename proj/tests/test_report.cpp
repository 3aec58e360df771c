#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "halfspace/errors.hpp"
#include "halfspace/report.hpp"

using namespace halfspace;

TEST_SUITE("report") {

TEST_CASE("non-finite numbers round trip through strings") {
    CHECK(json_number(INFINITY) == "inf");
    CHECK(json_number(-INFINITY) == "-inf");
    CHECK(std::isnan(number_from_json(json_number(NAN))));
    CHECK(number_from_json(json_number(0.25)) == 0.25);
    CHECK(std::isinf(number_from_json("inf")));
    CHECK_THROWS_AS(number_from_json("big"), DomainError);
}

TEST_CASE("config hash ignores key order") {
    Json a = Json::parse(R"({"T": 0.25, "system": "nse", "grid": {"L": 8, "H": 8}})");
    Json b = Json::parse(R"({"grid": {"H": 8, "L": 8}, "system": "nse", "T": 0.25})");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 64);
    b["T"] = 0.5;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("norm specs round trip") {
    for (auto s : {WeightedNormSpec::Lq(INFINITY), WeightedNormSpec::Yab(1, 0.5), WeightedNormSpec::Zaal(1, 1),
                   WeightedNormSpec::Ya(2)}) {
        WeightedNormSpec t = norm_from_json(to_json(s));
        CHECK(t.name() == s.name());
    }
    CHECK_THROWS_AS(norm_from_json(Json::parse(R"({"family": "Ya", "a": 1, "weight": 2})")), DomainError);
    CHECK_THROWS_AS(norm_from_json(Json::parse(R"({"family": "W", "a": 1})")), DomainError);
}

TEST_CASE("estimate report serialisation") {
    EstimateReport r;
    r.id = "lemma21";
    r.anchor = "radial-power-integral";
    r.samples = 3;
    r.sup_ratio = 0.5;
    r.verdict = "bounded";
    r.extras = {{"richardson_gap", 0.0}};
    Json j = to_json(r);
    CHECK(j["id"] == "lemma21");
    CHECK(j["sup_ratio"] == 0.5);
    CHECK(j.dump() == to_json(r).dump());
    std::string csv = estimates_csv({r});
    CHECK(csv.rfind("id,", 0) == 0);
    CHECK(csv.find("lemma21,radial-power-integral") != std::string::npos);
}

TEST_CASE("trace CSV has one row per iteration") {
    PicardTrace t;
    t.norms = {1, 1.1};
    t.diffs = {1, 0.1};
    t.ratios = {0, 0.1};
    t.div_residual = {0, 0};
    t.trace_residual = {0, 0};
    t.director_drift = {0, 0};
    std::string csv = trace_csv(t);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("SVG plot") {
    std::string s = svg_loglog({{"u", {1, 2, 4}, {1, 0.5, 0.25}}, {"bad", {1, -1}, {0, 1}}}, "decay", "t", "norm");
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("polyline") != std::string::npos);
    CHECK(s.find("</svg>") != std::string::npos);
}

TEST_CASE("file helpers") {
    auto p = (std::filesystem::temp_directory_path() / "halfspace_report_test.json").string();
    write_json(Json{{"a", 1}}, p);
    CHECK(Json::parse(read_text(p))["a"] == 1);
    std::filesystem::remove(p);
    CHECK_THROWS_AS(read_text(p), IoError);
    CHECK_THROWS_AS(write_text("x", "/nonexistent_dir/x.txt"), IoError);
}

}  // TEST_SUITE
