#include "epiplan/flowgraph/executor.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

namespace epiplan::flow {

namespace {

using Clock = std::chrono::steady_clock;

class Scheduler {
public:
    Scheduler(const FlowGraph& g, const SlotValues& inputs, const Registry& registry, const Budget& budget)
        : g_(g), inputs_(inputs), registry_(registry), budget_(budget), n_(g.nodes.size()) {
        for (std::size_t i = 0; i < n_; ++i) index_[g.nodes[i].id] = i;
        preds_.resize(n_);
        succs_.resize(n_);
        slot_sources_.resize(n_);
        owners_.resize(n_);
        auto link = [&](std::size_t from, std::size_t to) {
            preds_[to].insert(from);
            succs_[from].insert(to);
        };
        for (const auto& e : g.edges) {
            const std::size_t to = index_.at(e.to);
            if (!e.slot.empty()) slot_sources_[to].emplace_back(e.slot, e.from);
            if (!is_entry_ref(e.from)) link(index_.at(e.from), to);
        }
        for (std::size_t i = 0; i < n_; ++i) {
            for (const auto& [label, succ] : branch_successors(g.nodes[i])) {
                const std::size_t s = index_.at(succ);
                link(i, s);
                owners_[s].emplace_back(i, label);
            }
        }
        remaining_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) remaining_[i] = preds_[i].size();
        status_.resize(n_);
        values_.resize(n_);
        records_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            records_[i].node = g.nodes[i].id;
            records_[i].kind = g.nodes[i].kind;
        }
    }

    ExecutionResult run() {
        t0_ = Clock::now();
        {
            std::lock_guard lock(mu_);
            for (std::size_t i = 0; i < n_; ++i)
                if (remaining_[i] == 0) resolve(i);
        }
        const std::size_t workers = std::min<std::size_t>(std::max<std::size_t>(budget_.max_parallel, 1), n_);
        if (workers <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < workers; ++w) pool.emplace_back([this] { work(); });
            for (auto& t : pool) t.join();
        }

        ExecutionResult result;
        result.trace.records = std::move(records_);
        result.failures = std::move(failures_);
        for (const auto& [name, node] : g_.outputs) {
            const std::size_t i = index_.at(node);
            if (status_[i] == NodeStatus::Succeeded) result.outputs[name] = *values_[i];
        }
        return result;
    }

private:
    double now_ms() const { return std::chrono::duration<double, std::milli>(Clock::now() - t0_).count(); }

    // Called with mu_ held once every predecessor of i has settled.
    void resolve(std::size_t i) {
        for (std::size_t p : preds_[i]) {
            if (status_[p] != NodeStatus::Succeeded) {
                const bool failed = status_[p] == NodeStatus::Failed;
                return skip(i, "upstream " + g_.nodes[p].id + (failed ? " failed" : " skipped"));
            }
        }
        for (const auto& [branch, label] : owners_[i]) {
            if (values_[branch]->get<std::string>() != label)
                return skip(i, "branch " + g_.nodes[branch].id + " selected \"" + values_[branch]->get<std::string>() + "\"");
        }
        ready_.push_back(i);
        cv_.notify_one();
    }

    void skip(std::size_t i, std::string reason) {
        status_[i] = NodeStatus::Skipped;
        records_[i].status = NodeStatus::Skipped;
        records_[i].error = std::move(reason);
        settle(i);
    }

    void settle(std::size_t i) {
        ++finished_;
        for (std::size_t s : succs_[i])
            if (--remaining_[s] == 0) resolve(s);
        if (finished_ == n_) cv_.notify_all();
    }

    SlotValues gather(std::size_t i) const {
        SlotValues slots;
        for (const auto& [slot, from] : slot_sources_[i])
            slots[slot] = is_entry_ref(from) ? inputs_.at(from.substr(1)) : *values_[index_.at(from)];
        return slots;
    }

    void work() {
        std::unique_lock lock(mu_);
        while (true) {
            cv_.wait(lock, [&] { return !ready_.empty() || finished_ == n_; });
            if (ready_.empty()) return;
            const std::size_t i = ready_.front();
            ready_.pop_front();
            SlotValues slots = gather(i);
            lock.unlock();

            Attempt a = attempt(g_.nodes[i], slots);

            lock.lock();
            auto& rec = records_[i];
            rec.attempts = a.attempts;
            rec.start_ms = a.start_ms;
            rec.end_ms = a.end_ms;
            rec.inputs = Json::object();
            for (auto& [k, v] : slots) rec.inputs[k] = std::move(v);
            if (a.value) {
                status_[i] = NodeStatus::Succeeded;
                rec.status = NodeStatus::Succeeded;
                rec.output = *a.value;
                values_[i] = std::move(a.value);
            } else {
                status_[i] = NodeStatus::Failed;
                rec.status = NodeStatus::Failed;
                rec.error = a.error;
                failures_.push_back({g_.nodes[i].id, a.error, a.attempts, a.retryable, a.exception});
            }
            settle(i);
        }
    }

    struct Attempt {
        std::optional<Json> value;
        std::string error;
        bool retryable = false;
        std::exception_ptr exception;
        int attempts = 0;
        double start_ms = 0;
        double end_ms = 0;
    };

    // Timeouts are cooperative: a body that overruns is allowed to finish,
    // then its result is discarded and the attempt counts as timed out.
    Attempt attempt(const NodeSpec& node, const SlotValues& slots) const {
        Attempt a;
        a.start_ms = now_ms();
        while (true) {
            ++a.attempts;
            const auto begin = Clock::now();
            try {
                Json v = run_node(node, slots, registry_, budget_);
                if (Clock::now() - begin > budget_.per_node_timeout)
                    throw Timeout("node " + node.id + " exceeded " + std::to_string(budget_.per_node_timeout.count()) + " ms");
                a.value = std::move(v);
                break;
            } catch (const RetryableError& e) {
                a.error = e.what();
                a.retryable = true;
                a.exception = std::current_exception();
                if (a.attempts > budget_.max_retries) break;
            } catch (const std::exception& e) {
                a.error = e.what();
                a.retryable = false;
                a.exception = std::current_exception();
                break;
            }
        }
        a.end_ms = now_ms();
        return a;
    }

    const FlowGraph& g_;
    const SlotValues& inputs_;
    const Registry& registry_;
    const Budget& budget_;
    const std::size_t n_;
    Clock::time_point t0_;

    std::map<std::string, std::size_t> index_;
    std::vector<std::set<std::size_t>> preds_, succs_;
    std::vector<std::vector<std::pair<std::string, std::string>>> slot_sources_;
    std::vector<std::vector<std::pair<std::size_t, std::string>>> owners_;

    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::size_t> ready_;
    std::vector<std::size_t> remaining_;
    std::vector<std::optional<NodeStatus>> status_;
    std::vector<std::optional<Json>> values_;
    std::vector<TraceRecord> records_;
    std::vector<NodeFailureInfo> failures_;
    std::size_t finished_ = 0;
};

}  // namespace

std::string_view to_string(NodeStatus s) {
    switch (s) {
        case NodeStatus::Succeeded: return "Succeeded";
        case NodeStatus::Failed: return "Failed";
        case NodeStatus::Skipped: return "Skipped";
    }
    return "";
}

ExecutionResult execute(const FlowGraph& graph, const SlotValues& inputs, const Registry& registry, const Budget& budget) {
    if (auto report = validate_graph(graph); !report.empty()) throw InvalidGraph(std::move(report));
    if (auto missing = check_registry(graph, registry); !missing.empty()) {
        const auto& v = missing.front();
        auto colon = v.detail.find(':');
        throw UnknownRegistryName(v.detail.substr(0, colon), v.detail.substr(colon + 1));
    }
    for (const auto& name : graph.entry_inputs)
        if (!inputs.contains(name)) throw std::invalid_argument("missing graph input \"" + name + "\"");
    for (const auto& [name, value] : inputs) {
        if (std::find(graph.entry_inputs.begin(), graph.entry_inputs.end(), name) == graph.entry_inputs.end())
            throw std::invalid_argument("unexpected graph input \"" + name + "\"");
    }
    if (graph.nodes.empty()) return {};
    return Scheduler(graph, inputs, registry, budget).run();
}

}  // namespace epiplan::flow
