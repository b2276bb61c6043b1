#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mrct/congest.hpp"
#include "mrct/sptrees.hpp"

namespace mrct::detail {

using WaveFields = std::vector<std::uint64_t>;
using WaveCombine = std::function<void(WaveFields& acc, const Message& report, Delay delay)>;

/// Every node sends its accumulated fields for root v to its parent in T_v at
/// slot budget - tau. Children finish earlier than parents along every tree
/// edge, so reports are always in before the scheduled send.
class ReverseWaveProgram : public NodeProgram {
public:
    ReverseWaveProgram(LocalView view, const SpTrees& trees, std::vector<WaveFields> initial,
                       WaveCombine combine, std::vector<WaveFields>& result)
        : view_(view), trees_(trees), acc_(std::move(initial)), sent_(trees.roots.size(), false),
          combine_(std::move(combine)), result_(result) {
        const auto& entries = trees.tables[view.id].entries;
        for (std::size_t k = 0; k < entries.size(); ++k) {
            const auto& e = entries[k];
            if (!e.parent_edge) continue;
            if (e.tau >= trees.budget) {
                throw CorrectnessViolation("node " + std::to_string(view.id) + " has tau " +
                                           std::to_string(e.tau) + " for root " +
                                           std::to_string(trees.roots[k]) + ", budget " +
                                           std::to_string(trees.budget));
            }
            schedule_[trees.budget - e.tau].push_back(k);
        }
    }

    void step(Slot slot, std::span<const Inbound> inbox, Outbox& out) override {
        for (const auto& in : inbox) {
            auto root = static_cast<NodeId>(in.message[0]);
            auto k = trees_.root_index(root);
            if (!k) throw ProtocolViolation("report for unknown root " + std::to_string(root));
            if (sent_[*k]) {
                throw ScheduleViolation("node " + std::to_string(view_.id) + " got a report for root " +
                                        std::to_string(root) + " in slot " + std::to_string(slot - 1) +
                                        " after sending its own");
            }
            combine_(acc_[*k], in.message, view_.delay(in.edge));
        }
        if (auto it = schedule_.find(slot); it != schedule_.end()) {
            for (auto k : it->second) {
                Message m;
                m.fields.push_back(trees_.roots[k]);
                m.fields.insert(m.fields.end(), acc_[k].begin(), acc_[k].end());
                out.send(*trees_.tables[view_.id].entries[k].parent_edge, std::move(m));
                sent_[k] = true;
            }
        }
        if (slot > trees_.budget) {
            result_ = acc_;
            done_ = true;
        }
    }

    bool halted() const override { return done_; }

private:
    LocalView view_;
    const SpTrees& trees_;
    std::vector<WaveFields> acc_;
    std::vector<bool> sent_;
    std::map<Slot, std::vector<std::size_t>> schedule_;
    WaveCombine combine_;
    std::vector<WaveFields>& result_;
    bool done_ = false;
};

/// Runs one reverse wave; `initial(u)` gives node u's starting fields per root.
template <class Initial>
std::pair<std::vector<std::vector<WaveFields>>, ExecutionReport> run_reverse_wave(
    RoundEngine& engine, const SpTrees& trees, Initial initial, const WaveCombine& combine) {
    const Graph& g = engine.graph();
    std::vector<std::vector<WaveFields>> result(g.node_count() + 1);
    ProgramList programs;
    for (NodeId u = 1; u <= g.node_count(); ++u) {
        programs.push_back(
            std::make_unique<ReverseWaveProgram>(engine.view(u), trees, initial(u), combine, result[u]));
    }
    auto report = engine.run(programs, trees.budget + 1);
    return {std::move(result), report};
}

}  // namespace mrct::detail
