#include "epiplan/pipeline/grounding.hpp"

#include "epiplan/common/text.hpp"

namespace epiplan::pipeline {

GroundingReport ground_task_list(std::span<const TaskItem> items, std::span<const kb::ResponseAction> plans,
                                 kb::RiskLevel level) {
    GroundingReport report;
    for (const auto& item : items) {
        const auto action = text::canonical(item.action);
        const auto work = text::canonical(item.work_requirement);
        const auto party = text::canonical(item.responsible_party);
        const auto limit = text::canonical(item.time_limit);

        auto party_ok = [&](const kb::ResponseAction& r) {
            return text::canonical(kb::select_responsible_party(r, level)) == party;
        };
        auto limit_ok = [&](const kb::ResponseAction& r) { return text::canonical(r.time_limit) == limit; };

        std::optional<std::size_t> first, by_work, by_fields;
        for (std::size_t i = 0; i < plans.size(); ++i) {
            if (text::canonical(plans[i].action) != action) continue;
            if (!first) first = i;
            if (!by_work && text::canonical(plans[i].work_requirement) == work) by_work = i;
            if (!by_fields && party_ok(plans[i]) && limit_ok(plans[i])) by_fields = i;
        }

        ItemGrounding g;
        g.record = by_work ? by_work : by_fields ? by_fields : first;
        if (!g.record) {
            g.flags.push_back(GroundingFlag::Hallucinated);
        } else {
            const auto& rec = plans[*g.record];
            if (!party_ok(rec)) g.flags.push_back(GroundingFlag::PartyMismatch);
            if (!limit_ok(rec)) g.flags.push_back(GroundingFlag::TimeLimitMismatch);
        }
        report.items.push_back(std::move(g));
    }
    return report;
}

}  // namespace epiplan::pipeline
