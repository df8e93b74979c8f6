#include "iuws/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "iuws/error.hpp"

namespace iuws {

using nlohmann::json;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const CapWidthResult& r)
{
    return {{"w", number(r.w)},
            {"eta", r.eta},
            {"infinite", r.infinite},
            {"window_limited", r.window_limited},
            {"empty_domain", r.empty_domain},
            {"tested_centers", r.tested_centers},
            {"searched_centers", r.searched_centers},
            {"worst_center", json::array({r.worst_center.u, r.worst_center.v})},
            {"lo", number(r.lo)},
            {"hi", number(r.hi)},
            {"search", to_string(r.search)}};
}

bool VerificationReport::all_pass() const
{
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckRecord& c) { return c.pass && !c.skipped; });
}

json to_json(const CheckRecord& r, bool timestamps)
{
    json j = {{"id", r.id},
              {"anchor", r.anchor},
              {"description", r.description},
              {"measured", r.measured},
              {"constants", r.constants},
              {"pass", r.pass}};
    if (r.skipped) {
        j["skipped"] = true;
        j["skip_reason"] = r.skip_reason;
    }
    if (timestamps) j["runtime_seconds"] = r.runtime;
    return j;
}

json to_json(const VerificationReport& r, bool timestamps)
{
    json checks = json::array();
    std::size_t passed = 0;
    for (const CheckRecord& c : r.checks) {
        checks.push_back(to_json(c, timestamps));
        if (c.pass && !c.skipped) ++passed;
    }
    json j = {{"h", r.h},
              {"corpus", r.corpus},
              {"seed", r.seed},
              {"checks", checks},
              {"passed", passed},
              {"total", r.checks.size()},
              {"all_pass", r.all_pass()}};
    if (timestamps) j["runtime_seconds"] = r.runtime;
    return j;
}

std::vector<RunConfig> standard_corpus()
{
    const auto make = [](std::string name, ModelSurface s, DomainSpec spec) {
        json j = {{"name", name}, {"surface", to_string(s.kind)}, {"domain", to_json(spec)}};
        return parse_config(j);
    };
    const ModelSurface E = ModelSurface::euclidean();
    const ModelSurface H = ModelSurface::hyperbolic();
    std::vector<RunConfig> out;
    out.push_back(make("disk", E, {GeodesicBall{1.0}, {0.0, 0.0}}));
    out.push_back(make("rectangle", E, {Rectangle{1.0, 2.0}, {0.0, 0.0}}));
    out.push_back(make("annulus", E, {Annulus{0.25, 1.0}, {0.0, 0.0}}));
    // the ratio is not monotone in r around centres beside the hole
    out.back().capwidth.search = WidthSearch::linear;
    out.push_back(make("strip_a0.1", E, {Strip{0.1, 2.0}, {0.0, 0.0}}));
    out.push_back(make("strip_a0.2", E, {Strip{0.2, 2.0}, {0.0, 0.0}}));
    out.push_back(make("john_comb", E, {JohnComb{}, {0.0, 0.0}}));
    out.push_back(make("cusp", E, {Cusp{4.0, 1.0}, {0.0, 0.0}}));
    for (const auto& [name, r] : std::vector<std::pair<std::string, double>>{
             {"hyperbolic_ball_r0.5", 0.5},
             {"hyperbolic_ball_r1", 1.0},
             {"hyperbolic_ball_r2", 2.0},
             {"hyperbolic_ball_r4", 4.0},
             {"hyperbolic_ball_r8", 8.0}}) {
        out.push_back(make(name, H, {GeodesicBall{r}, {0.0, 0.0}}));
    }
    return out;
}

std::vector<RunConfig> load_corpus(const std::string& corpus, double h)
{
    std::vector<RunConfig> out;
    if (corpus == "standard") {
        out = standard_corpus();
    } else {
        const std::filesystem::path dir(corpus);
        if (!std::filesystem::is_directory(dir)) {
            throw Error(ErrorKind::validation, "corpus must be 'standard' or a directory");
        }
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.path().extension() == ".json") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            RunConfig cfg = load_config(f.string());
            if (cfg.name.empty()) cfg.name = f.stem().string();
            out.push_back(std::move(cfg));
        }
        if (out.empty()) throw Error(ErrorKind::validation, "corpus directory has no configs");
    }
    for (RunConfig& cfg : out) cfg.h = h;
    return out;
}

}  // namespace iuws
