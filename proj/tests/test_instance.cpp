#include <filesystem>

#include <gtest/gtest.h>

#include "cpdptw/cpdptw.hpp"

using namespace cpdptw;

TEST(Instance, NodeNumbering) {
    const Instance inst = generate(3, 2, 5.0, WindowProfile::Uniform, 1);
    EXPECT_EQ(inst.n_nodes(), 8);
    EXPECT_EQ(inst.pickup_node(2), 2);
    EXPECT_EQ(inst.delivery_node(2), 5);
    EXPECT_EQ(inst.depot_node(1), 7);
    EXPECT_TRUE(inst.is_pickup(0));
    EXPECT_TRUE(inst.is_delivery(3));
    EXPECT_TRUE(inst.is_depot(6));
    EXPECT_FALSE(inst.is_depot(8));
    EXPECT_EQ(inst.customer_of(4), 1);
    EXPECT_EQ(inst.node_demand(1), inst.customers[1].demand);
    EXPECT_EQ(inst.node_demand(4), -inst.customers[1].demand);
    EXPECT_EQ(inst.node_demand(6), 0.0);
}

TEST(Instance, GenerationIsDeterministic) {
    const Instance a = generate(12, 2, 4.0, WindowProfile::PoissonPeak, 42);
    const Instance b = generate(12, 2, 4.0, WindowProfile::PoissonPeak, 42);
    const Instance c = generate(12, 2, 4.0, WindowProfile::PoissonPeak, 43);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    EXPECT_NE(to_json(a).dump(), to_json(c).dump());
}

TEST(Instance, GeneratedValuesRespectRanges) {
    for (auto profile : {WindowProfile::Uniform, WindowProfile::PoissonPeak, WindowProfile::Tight}) {
        const Instance inst = generate(50, 3, 5.0, profile, 9);
        check_instance(inst);
        double last_open = 0.0;
        for (const auto& c : inst.customers) {
            EXPECT_GE(c.demand, 1);
            EXPECT_LE(c.demand, 10);
            EXPECT_EQ(c.demand, std::floor(c.demand));
            for (Point p : {c.pickup_loc, c.delivery_loc}) {
                EXPECT_GE(p.x, 0.0);
                EXPECT_LE(p.x, 5.0);
                EXPECT_GE(p.y, 0.0);
                EXPECT_LE(p.y, 5.0);
            }
            const double span = c.late - c.early;
            if (profile == WindowProfile::Tight) {
                EXPECT_GE(span, 15.0);
                EXPECT_LE(span, 25.0);
            } else {
                EXPECT_GE(span, 30.0);
                EXPECT_LE(span, 60.0);
            }
            if (profile == WindowProfile::PoissonPeak) {
                EXPECT_GE(c.early, last_open);
                last_open = c.early;
            }
        }
    }
}

TEST(Instance, GeneratorRejectsBadArguments) {
    EXPECT_THROW(generate(0, 1, 5.0, WindowProfile::Uniform, 1), ContractViolation);
    EXPECT_THROW(generate(3, 0, 5.0, WindowProfile::Uniform, 1), ContractViolation);
    EXPECT_THROW(generate(3, 1, -1.0, WindowProfile::Uniform, 1), ContractViolation);
}

TEST(Instance, JsonRoundTrip) {
    const Instance a = generate(7, 2, 3.0, WindowProfile::Tight, 5);
    const Instance b = instance_from_json(to_json(a));
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    const auto path = std::filesystem::temp_directory_path() / "cpdptw_instance_roundtrip.json";
    save_instance(a, path.string());
    EXPECT_EQ(to_json(load_instance(path.string())).dump(), to_json(a).dump());
    std::filesystem::remove(path);
}

TEST(Instance, ParseErrorsNameTheField) {
    auto doc = to_json(generate(2, 1, 3.0, WindowProfile::Uniform, 5));
    auto expect_field = [](const nlohmann::json& d, const std::string& needle) {
        try {
            instance_from_json(d);
            FAIL() << "expected a parse error mentioning " << needle;
        } catch (const ParseError& e) {
            EXPECT_NE(e.field().find(needle), std::string::npos) << e.field();
        }
    };
    auto missing = doc;
    missing["customers"][1].erase("demand");
    expect_field(missing, "demand");
    auto wrong_type = doc;
    wrong_type["customers"][0]["late"] = "soon";
    expect_field(wrong_type, "late");
    auto version = doc;
    version["format_version"] = 99;
    expect_field(version, "format_version");
}

TEST(Instance, InconsistentWindowsAreRejected) {
    auto doc = to_json(generate(2, 1, 3.0, WindowProfile::Uniform, 5));
    doc["customers"][0]["late"] = -1.0;
    EXPECT_THROW(instance_from_json(doc), Error);
}

TEST(Fleet, RoundRobinDepotsAndDefaults) {
    const Instance inst = generate(3, 2, 5.0, WindowProfile::Uniform, 1);
    const FleetSpec f = make_fleet(inst, 2, 2);
    ASSERT_EQ(f.size(), 4);
    EXPECT_EQ(f.vehicles[0].mode, Mode::UAV);
    EXPECT_EQ(f.vehicles[3].mode, Mode::ADR);
    EXPECT_EQ(f.vehicles[0].start_depot, inst.depot_node(0));
    EXPECT_EQ(f.vehicles[1].start_depot, inst.depot_node(1));
    EXPECT_DOUBLE_EQ(f.vehicles[0].max_speed, 20.0);
    EXPECT_DOUBLE_EQ(f.vehicles[2].max_speed, 8.3);
    const FleetSpec back = fleet_from_json(to_json(f));
    EXPECT_EQ(to_json(back).dump(), to_json(f).dump());
}

TEST(Fleet, ValidationCatchesBadVehicles) {
    const Instance inst = generate(3, 1, 5.0, WindowProfile::Uniform, 1);
    FleetSpec f = make_fleet(inst, 1, 1);
    f.vehicles[0].battery_floor = 1.5;
    EXPECT_THROW(check_fleet(f, inst), ContractViolation);
    f = make_fleet(inst, 1, 1);
    f.vehicles[1].start_depot = 0;
    EXPECT_THROW(check_fleet(f, inst), ContractViolation);
}
