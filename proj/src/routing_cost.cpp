#include "mrct/routing_cost.hpp"

#include <stdexcept>
#include <string>

#include "detail/reverse_wave.hpp"
#include "mrct/oracle.hpp"

namespace mrct {

Cost rc_formula(std::uint64_t z, std::uint64_t terminal_count, Delay delay) {
    if (z > terminal_count) {
        throw std::invalid_argument("subtree count " + std::to_string(z) + " exceeds |S| = " +
                                    std::to_string(terminal_count));
    }
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(z, terminal_count - z, &out) || __builtin_mul_overflow(out, 2u, &out) ||
        __builtin_mul_overflow(out, static_cast<std::uint64_t>(delay), &out) ||
        out > static_cast<std::uint64_t>(kInfiniteCost)) {
        throw std::overflow_error("routing cost term overflows");
    }
    return static_cast<Cost>(out);
}

RoutingCosts compute_all_rc(RoundEngine& engine, const SpTrees& trees, const TerminalSet& terminals,
                            CostWaveOptions options) {
    const std::uint64_t s = terminals.size();
    auto initial = [&](NodeId u) {
        std::uint64_t z0 = terminals.contains(u) ? 1 : 0;
        if (u == options.corrupt_z_at) z0 = 1 - z0;
        return std::vector<detail::WaveFields>(trees.roots.size(), detail::WaveFields{0, z0});
    };
    auto add = [s](detail::WaveFields& acc, const Message& report, Delay w) {
        auto z = report[2];
        Cost term = rc_formula(z, s, w);
        acc[0] += report[1] + static_cast<std::uint64_t>(term);
        acc[1] += z;
    };
    auto [fields, report] = detail::run_reverse_wave(engine, trees, initial, add);

    RoutingCosts costs;
    costs.roots = trees.roots;
    costs.report = report;
    costs.tables.resize(fields.size());
    for (std::size_t u = 1; u < fields.size(); ++u) {
        for (const auto& f : fields[u]) {
            costs.tables[u].rc.push_back(static_cast<Cost>(f[0]));
            costs.tables[u].z.push_back(f[1]);
        }
    }
    for (std::size_t k = 0; k < trees.roots.size(); ++k) {
        costs.rc.push_back(costs.tables[trees.roots[k]].rc[k]);
    }
    return costs;
}

bool oracle_rc_check(const Graph& g, const SpTrees& trees, const TerminalSet& terminals,
                     std::size_t root_index, Cost claimed) {
    return oracle::rc_exact(g, trees.tree_of(g, root_index), terminals) == claimed;
}

nlohmann::json routing_costs_json(const RoutingCosts& costs, const std::vector<Cost>* ssrc) {
    nlohmann::json out = nlohmann::json::object();
    for (std::size_t k = 0; k < costs.roots.size(); ++k) {
        nlohmann::json s = nullptr;
        if (ssrc) s = (*ssrc)[k];
        out[std::to_string(costs.roots[k])] = {{"rc", costs.rc[k]}, {"ssrc", s}};
    }
    return out;
}

}  // namespace mrct
