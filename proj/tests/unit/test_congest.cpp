#include "doctest.h"
#include "mrct/congest.hpp"

using namespace mrct;

namespace {

// Sends one fixed payload on every edge in slot 1, then records arrivals.
class OneShot : public NodeProgram {
public:
    OneShot(Message m, std::vector<Slot>& arrivals) : m_(std::move(m)), arrivals_(arrivals) {}

    void step(Slot slot, std::span<const Inbound> inbox, Outbox& out) override {
        if (slot == 1) {
            out.send_all(m_);
            return;
        }
        if (!inbox.empty()) {
            arrivals_.push_back(slot);
            done_ = true;
        }
    }
    bool halted() const override { return done_; }

private:
    Message m_;
    std::vector<Slot>& arrivals_;
    bool done_ = false;
};

class DoubleSend : public NodeProgram {
public:
    void step(Slot, std::span<const Inbound>, Outbox& out) override {
        out.send(0, Message{1});
        out.send(0, Message{2});
        done_ = true;
    }
    bool halted() const override { return done_; }

private:
    bool done_ = false;
};

Graph two_nodes(Delay w) {
    std::vector<Edge> e{{1, 2, w}};
    return Graph::from_edges(2, e);
}

}  // namespace

TEST_CASE("field sizes") {
    CHECK(field_bits(0) == 1);
    CHECK(field_bits(1) == 2);
    CHECK(field_bits(2) == 2);
    CHECK(field_bits(6) == 3);
    CHECK(Message{0, 1, 6}.bit_size() == 6);
    CHECK(default_bandwidth(2) == 8);
    CHECK(default_bandwidth(64) == 48);
    CHECK(default_bandwidth(65) == 56);
}

TEST_CASE("two nodes, one 16-bit payload each") {
    auto g = two_nodes(1);
    RoundEngine engine(g, {.bandwidth_bits = 16});
    std::vector<Slot> a1, a2;
    ProgramList programs;
    // 65534 needs exactly 16 bits.
    programs.push_back(std::make_unique<OneShot>(Message{65534}, a1));
    programs.push_back(std::make_unique<OneShot>(Message{65534}, a2));
    auto report = engine.run(programs, 10);
    CHECK(report.rounds_used == 2);
    CHECK(report.max_edge_bits == 16);
    CHECK(report.messages_total == 2);
    CHECK(report.halted_all);
    CHECK(a1 == std::vector<Slot>{2});
}

TEST_CASE("delay 3 delivers at slot 4") {
    auto g = two_nodes(3);
    RoundEngine engine(g, {.bandwidth_bits = 16});
    std::vector<Slot> a1, a2;
    ProgramList programs;
    programs.push_back(std::make_unique<OneShot>(Message{5}, a1));
    programs.push_back(std::make_unique<OneShot>(Message{5}, a2));
    auto report = engine.run(programs, 10);
    CHECK(a2 == std::vector<Slot>{4});
    CHECK(report.rounds_used == 4);
}

TEST_CASE("bandwidth and protocol violations are hard errors") {
    auto g = two_nodes(1);
    RoundEngine engine(g);
    CHECK(engine.bandwidth() == 8);
    std::vector<Slot> a1, a2;
    ProgramList programs;
    programs.push_back(std::make_unique<OneShot>(Message{1000}, a1));
    programs.push_back(std::make_unique<OneShot>(Message{1}, a2));
    CHECK_THROWS_AS(engine.run(programs, 10), BandwidthViolation);

    ProgramList twice;
    twice.push_back(std::make_unique<DoubleSend>());
    twice.push_back(std::make_unique<DoubleSend>());
    CHECK_THROWS_AS(engine.run(twice, 10), ProtocolViolation);

    Outbox box(2);
    CHECK_THROWS_AS(box.send(2, Message{1}), ProtocolViolation);
}

TEST_CASE("flood broadcast") {
    auto k4 = generate(GraphKind::clique, 4);
    RoundEngine e1(k4);
    auto r = flood_broadcast(e1, 1, 42);
    for (NodeId u = 2; u <= 4; ++u) {
        CHECK(r.value(u) == 42u);
        CHECK(r.received_in[u] == 1);
    }

    auto p3 = generate(GraphKind::path, 3);
    RoundEngine e2(p3);
    auto q = flood_broadcast(e2, 1, 7);
    CHECK(q.received_in[2] == 1);
    CHECK(q.received_in[3] == 2);
    CHECK(q.value(3) == 7u);
}

TEST_CASE("tree broadcast on a star takes one slot") {
    auto star = generate(GraphKind::star, 6);
    RoundEngine engine(star);
    ParentMap tree{kNoNode, kNoNode, 1, 1, 1, 1, 1};
    auto r = tree_broadcast(engine, tree, Message{3, 9});
    for (NodeId u = 2; u <= 6; ++u) {
        CHECK(r.received_in[u] == 1);
        REQUIRE(r.payload[u]);
        CHECK((*r.payload[u])[1] == 9);
    }
    CHECK(r.report.charged_slots() == 1);
}

TEST_CASE("convergecasts") {
    auto star = generate(GraphKind::star, 4);
    RoundEngine engine(star);
    ParentMap tree{kNoNode, kNoNode, 1, 1, 1};
    auto m = convergecast_min(engine, tree, {std::nullopt, 5, 3, 1, 2});
    CHECK(m.value == 1u);
    CHECK(m.arg == 3);

    auto tie = convergecast_min(engine, tree, {std::nullopt, std::nullopt, 2, std::nullopt, 2});
    CHECK(tie.value == 2u);
    CHECK(tie.arg == 2);

    auto none = convergecast_min(engine, tree, {std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt});
    CHECK_FALSE(none.value);

    auto p3 = generate(GraphKind::path, 3);
    RoundEngine e2(p3);
    auto s = convergecast_sum(e2, {kNoNode, kNoNode, 1, 2}, {0, 1, 2, 3});
    CHECK(s.value == 6);
}

TEST_CASE("tree validation") {
    auto p3 = generate(GraphKind::path, 3);
    CHECK(validate_tree(p3, {kNoNode, 2, kNoNode, 2}) == 2);
    CHECK_THROWS_AS(validate_tree(p3, {kNoNode, kNoNode, kNoNode, 2}), StructureError);
    CHECK_THROWS_AS(validate_tree(p3, {kNoNode, 3, kNoNode, 2}), StructureError);
    CHECK_THROWS_AS(validate_tree(p3, {kNoNode, 2, 1, 2}), StructureError);
    CHECK_THROWS_AS(validate_tree(p3, {kNoNode, 2, kNoNode}), StructureError);
}

TEST_CASE("threaded stepping matches sequential stepping") {
    GenerateOptions o;
    o.seed = 11;
    o.p = 0.2;
    o.max_delay = 3;
    auto g = generate(GraphKind::random_connected, 30, o);
    RoundEngine seq(g);
    RoundEngine par(g, {.threads = 4});
    auto a = flood_broadcast(seq, 5, 99);
    auto b = flood_broadcast(par, 5, 99);
    CHECK(a.received_in == b.received_in);
    CHECK(a.report.rounds_used == b.report.rounds_used);
    CHECK(a.report.messages_total == b.report.messages_total);
}
