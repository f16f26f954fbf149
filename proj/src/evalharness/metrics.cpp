#include "epiplan/evalharness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "epiplan/common/text.hpp"

namespace epiplan::eval {

GoldChecklist checklist_for(const model::Scenario& scenario) {
    GoldChecklist c;
    c.disease = scenario.disease;
    c.scenario_id = scenario.id;
    c.required_actions = scenario.checklist.required_actions;
    c.synonyms = scenario.checklist.synonyms;
    if (c.required_actions.empty()) throw std::invalid_argument("scenario " + scenario.id + " has no required actions");
    std::set<std::string> seen;
    for (const auto& a : c.required_actions)
        if (!seen.insert(text::canonical(a)).second)
            throw std::invalid_argument("scenario " + scenario.id + " requires \"" + a + "\" twice");
    return c;
}

Json to_json(const ScoreReport& r) {
    Json j;
    j["completeness"] = r.completeness;
    j["hits"] = r.hits;
    j["misses"] = r.misses;
    j["extras"] = r.extras;
    return j;
}

ScoreReport completeness_score(std::span<const pipeline::TaskItem> items, const GoldChecklist& checklist) {
    if (checklist.required_actions.empty()) throw std::invalid_argument("checklist is empty");

    std::map<std::string, std::set<std::string>> accepted;  // canonical required -> canonical names
    for (const auto& req : checklist.required_actions) accepted[text::canonical(req)].insert(text::canonical(req));
    for (const auto& [req, alts] : checklist.synonyms)
        for (const auto& alt : alts) accepted[text::canonical(req)].insert(text::canonical(alt));

    std::set<std::string> generated;
    for (const auto& item : items) generated.insert(text::canonical(item.action));

    ScoreReport r;
    std::set<std::string> claimed;
    for (const auto& req : checklist.required_actions) {
        const auto& names = accepted[text::canonical(req)];
        bool hit = false;
        for (const auto& name : names) {
            if (generated.contains(name)) {
                hit = true;
                claimed.insert(name);
            }
        }
        (hit ? r.hits : r.misses).push_back(req);
    }
    std::set<std::string> listed;
    for (const auto& item : items) {
        auto key = text::canonical(item.action);
        if (!claimed.contains(key) && listed.insert(key).second) r.extras.push_back(item.action);
    }
    r.completeness = 100.0 * static_cast<double>(r.hits.size()) / static_cast<double>(checklist.required_actions.size());
    return r;
}

Correlation pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw LengthMismatch("vectors differ in length: " + std::to_string(xs.size()) + " vs " + std::to_string(ys.size()));
    if (xs.size() < 3) throw LengthMismatch("correlation needs at least 3 pairs, got " + std::to_string(xs.size()));

    double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        // Written so that swapping xs and ys swaps sxx and syy bit for bit.
        const double w = (n - 1) / n;
        sxx += dx * dx * w;
        syy += dy * dy * w;
        sxy += dx * dy * w;
        mx += dx / n;
        my += dy / n;
    }
    if (sxx == 0) throw ConstantVector("first vector is constant");
    if (syy == 0) throw ConstantVector("second vector is constant");
    const double r = sxy / std::sqrt(sxx * syy);
    return {std::clamp(r, -1.0, 1.0), xs.size()};
}

MeanSd mean_sd(std::span<const double> values) {
    MeanSd out;
    double m2 = 0;
    for (double v : values) {
        ++out.n;
        const double d = v - out.mean;
        out.mean += d / static_cast<double>(out.n);
        m2 += d * (v - out.mean);
    }
    if (out.n > 1) out.sd = std::sqrt(m2 / static_cast<double>(out.n - 1));
    return out;
}

}  // namespace epiplan::eval
