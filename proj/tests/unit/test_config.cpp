#include <string>

#include "doctest.h"

#include "iuws/config.hpp"
#include "iuws/error.hpp"

using namespace iuws;
using nlohmann::json;

namespace {
ErrorKind kind_of(const json& j)
{
    try {
        parse_config(j);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("config accepted: " << j.dump());
    return ErrorKind::no_convergence;
}

json disk_doc()
{
    return json::parse(R"({"name": "disk", "surface": "euclidean", "h": 0.05,
                           "domain": {"kind": "geodesic_ball", "radius": 1.0, "center": [0, 0]}})");
}
}  // namespace

TEST_SUITE("config")
{
    TEST_CASE("defaults are injected")
    {
        const RunConfig c = parse_config(disk_doc());
        CHECK(c.eta == 0.5);
        CHECK(c.seed == 1);
        CHECK(c.survival.scheme == HeatScheme::tr_bdf2);
        CHECK(c.capwidth.search == WidthSearch::bisection);
        CHECK(c.window.umin == doctest::Approx(-3.0));
        CHECK(c.window.umax == doctest::Approx(3.0));
        json h = disk_doc();
        h["surface"] = "hyperbolic";
        CHECK(parse_config(h).window.umax == doctest::Approx(1.05));
    }

    TEST_CASE("every domain kind round-trips")
    {
        const char* domains[] = {
            R"({"kind": "geodesic_ball", "radius": 0.5, "center": [0.1, 0]})",
            R"({"kind": "annulus", "inner": 0.2, "outer": 0.8, "center": [0, 0]})",
            R"({"kind": "rectangle", "width": 1.0, "height": 0.5, "center": [0, 0]})",
            R"({"kind": "strip", "half_width": 0.1, "length": 2.0, "center": [0, 0]})",
            R"({"kind": "john_comb", "size": 1.0, "g0": 0.1, "beta": 0.5, "wall_height": 0.5,
                "wall_thickness": 0.05, "max_gaps": 6, "center": [0, 0]})",
            R"({"kind": "cusp", "exponent": 3.0, "length": 1.0, "center": [0, 0]})",
            R"({"kind": "sublevel", "threshold": 0.05, "pole": [0, 0],
                "base": {"kind": "geodesic_ball", "radius": 1.0, "center": [0, 0]}})",
        };
        for (const char* d : domains) {
            json doc = disk_doc();
            doc["domain"] = json::parse(d);
            const RunConfig c = parse_config(doc);
            CHECK(parse_config(to_json(c)) == c);
        }
    }

    TEST_CASE("options round-trip")
    {
        json doc = disk_doc();
        doc["survival"] = {{"times", {0.1, 0.2}}, {"dt", 0.001}, {"scheme", "crank_nicolson"}};
        doc["capwidth"] = {{"search", "linear"}, {"rmax", 0.5}};
        doc["seed"] = 42;
        const RunConfig c = parse_config(doc);
        CHECK(c.survival.scheme == HeatScheme::crank_nicolson);
        CHECK(c.capwidth.search == WidthSearch::linear);
        CHECK(c.capwidth.rmax == 0.5);
        CHECK(c.seed == 42);
        CHECK(parse_config(to_json(c)) == c);
    }

    TEST_CASE("invalid documents are rejected")
    {
        json j = disk_doc();
        j["colour"] = "red";
        CHECK(kind_of(j) == ErrorKind::validation);
        j = disk_doc();
        j["h"] = "small";
        CHECK(kind_of(j) == ErrorKind::validation);
        j = disk_doc();
        j["h"] = -0.1;
        CHECK(kind_of(j) == ErrorKind::validation);
        j = disk_doc();
        j["domain"]["kind"] = "torus";
        CHECK(kind_of(j) == ErrorKind::validation);
        j = disk_doc();
        j["domain"]["radius"] = -1.0;
        CHECK(kind_of(j) == ErrorKind::validation);
        j = disk_doc();
        j["seed"] = -4;
        CHECK(kind_of(j) == ErrorKind::validation);
        j = disk_doc();
        j["survival"] = {{"scheme", "leapfrog"}};
        CHECK(kind_of(j) == ErrorKind::validation);
        j = disk_doc();
        j["domain"] = {{"kind", "sublevel"}, {"threshold", 0.1}};
        CHECK(kind_of(j) == ErrorKind::validation);
        CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
    }

    TEST_CASE("systems built from configs")
    {
        const SystemPtr d = build_system(parse_config(disk_doc()));
        CHECK(domain_measure(*d) == doctest::Approx(3.14159).epsilon(0.03));
        json s = disk_doc();
        s["domain"] = json::parse(R"({"kind": "sublevel", "threshold": 0.11032, "pole": [0, 0],
                                      "base": {"kind": "geodesic_ball", "radius": 1.0, "center": [0, 0]}})");
        const SystemPtr ann = build_system(parse_config(s));
        CHECK(domain_measure(*ann) == doctest::Approx(0.75 * 3.14159).epsilon(0.06));
    }
}
