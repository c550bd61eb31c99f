#include <doctest.h>

#include <functional>
#include <random>

#include "aide/meddomain.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"

using namespace aide;
using nlohmann::json;

namespace {

CellKey key(Weekday d, Slot s, const std::string& med) { return CellKey{{d, s}, med}; }

Prescription rx(const std::string& med, std::map<SlotId, int> doses) { return Prescription{med, std::move(doses)}; }

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an aide::Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("enum names round-trip") {
    for (auto d : kAllDays) CHECK(parse_weekday(to_string(d)) == d);
    for (auto s : kAllSlots) CHECK(parse_slot(to_string(s)) == s);
    CHECK(parse_weekday("tue") == Weekday::Tuesday);
    CHECK(parse_weekday("TUESDAY") == Weekday::Tuesday);
    CHECK(parse_color("blue") == Color::Blue);
    CHECK(parse_shape("oval") == Shape::Oval);
    CHECK(code_of([] { parse_slot("noon"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_color("teal"); }) == ErrorCode::ParseError);
}

TEST_CASE("effective_schedule without events is the base dose map") {
    const std::vector<Prescription> p{rx("blue", {{{Weekday::Tuesday, Slot::Morning}, 1}})};
    const auto s = effective_schedule(p, {});
    CHECK(s.cells().size() == 1);
    CHECK(s.count(key(Weekday::Tuesday, Slot::Morning, "blue")) == 1);
}

TEST_CASE("a take-earlier event moves the evening dose to the morning") {
    const std::vector<Prescription> p{rx("blue", {{{Weekday::Tuesday, Slot::Evening}, 1}})};
    const std::vector<LifeEvent> e{
        {"appt", "blue", Weekday::Tuesday, Slot::Evening, Slot::Morning, "appointment, take earlier"}};
    const auto s = effective_schedule(p, e);
    CHECK(s.count(key(Weekday::Tuesday, Slot::Morning, "blue")) == 1);
    CHECK(s.count(key(Weekday::Tuesday, Slot::Evening, "blue")) == 0);
    CHECK(s.total() == 1);
}

TEST_CASE("effective_schedule matches the per-cell oracle for two meds and three events") {
    const std::vector<Prescription> p{
        rx("blue", {{{Weekday::Monday, Slot::Evening}, 1}, {{Weekday::Wednesday, Slot::Bedtime}, 2},
                    {{Weekday::Friday, Slot::Morning}, 1}}),
        rx("white", {{{Weekday::Monday, Slot::Afternoon}, 1}, {{Weekday::Thursday, Slot::Evening}, 1},
                     {{Weekday::Saturday, Slot::Bedtime}, 1}})};
    const std::vector<LifeEvent> e{
        {"e1", "blue", Weekday::Monday, Slot::Evening, Slot::Morning, "take earlier"},
        {"e2", "white", Weekday::Thursday, Slot::Evening, Slot::Afternoon, "take earlier"},
        {"e3", "blue", Weekday::Wednesday, Slot::Bedtime, Slot::Afternoon, "take earlier"}};
    const auto s = effective_schedule(p, e);
    const auto expected = oracle::schedule_by_cells(p, e);
    std::map<std::tuple<int, int, std::string>, int> got;
    for (const auto& [k, c] : s.cells()) got[{static_cast<int>(k.at.day), static_cast<int>(k.at.slot), k.medication}] = c;
    CHECK(got == expected);
}

TEST_CASE("effective_schedule errors") {
    const std::vector<Prescription> p{rx("blue", {{{Weekday::Tuesday, Slot::Evening}, 1}})};
    const std::vector<LifeEvent> unknown{{"x", "red", Weekday::Tuesday, Slot::Evening, Slot::Morning, ""}};
    const std::vector<LifeEvent> undosed{{"x", "blue", Weekday::Tuesday, Slot::Bedtime, Slot::Morning, ""}};
    CHECK(code_of([&] { effective_schedule(p, unknown); }) == ErrorCode::UnknownMedication);
    CHECK(code_of([&] { effective_schedule(p, undosed); }) == ErrorCode::EventWithoutBaseDose);
}

TEST_CASE("effective_schedule is order-independent for disjoint (med, day) events") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        auto inst = oracle::random_instance(rng);
        auto events = inst.scenario.events;
        if (events.size() < 2) continue;
        if (events[0].medication == events[1].medication && events[0].day == events[1].day) continue;
        std::swap(events[0], events[1]);
        CHECK(effective_schedule(inst.scenario.prescriptions, events) == inst.schedule);
    }
}

TEST_CASE("validate_grid examples") {
    Schedule s;
    s.set(key(Weekday::Tuesday, Slot::Morning, "blue"), 1);

    SUBCASE("two blue on Tuesday morning with one required is one extra pill") {
        SortingGridState g;
        g.set(key(Weekday::Tuesday, Slot::Morning, "blue"), 2);
        const auto d = validate_grid(g, s);
        REQUIRE(d.size() == 1);
        CHECK(d[0] == Discrepancy{DiscrepancyKind::ExtraPill, "blue", Weekday::Tuesday, Slot::Morning, std::nullopt});
    }
    SUBCASE("empty against empty") { CHECK(validate_grid({}, {}).empty()); }
    SUBCASE("blue in the evening when the morning is required is a wrong_time") {
        SortingGridState g;
        g.set(key(Weekday::Tuesday, Slot::Evening, "blue"), 1);
        const auto d = validate_grid(g, s);
        REQUIRE(d.size() == 1);
        CHECK(d[0] == Discrepancy{DiscrepancyKind::WrongTime, "blue", Weekday::Tuesday, Slot::Evening, Slot::Morning});
    }
    SUBCASE("a missing dose carries only needed_slot") {
        const auto d = validate_grid({}, s);
        REQUIRE(d.size() == 1);
        CHECK(d[0].kind == DiscrepancyKind::MissingPill);
        CHECK_FALSE(d[0].at_slot.has_value());
        CHECK(d[0].needed_slot == Slot::Morning);
    }
}

TEST_CASE("validate_grid agrees with the pairing oracle on random grids") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto inst = oracle::random_instance(rng);
        const auto& g = inst.scenario.initial_grid;
        const auto got = validate_grid(g, inst.schedule);
        std::vector<oracle::OracleDiscrepancy> mapped;
        int units = 0;
        for (const auto& d : got) {
            mapped.push_back(oracle::to_oracle(d));
            units += d.kind == DiscrepancyKind::WrongTime ? 2 : 1;
            if (d.kind == DiscrepancyKind::WrongTime) CHECK((d.at_slot && d.needed_slot));
            if (d.kind == DiscrepancyKind::MissingPill) CHECK((!d.at_slot && d.needed_slot));
            if (d.kind == DiscrepancyKind::ExtraPill) CHECK((d.at_slot && !d.needed_slot));
        }
        // Only (day, slot, med) order is fixed; ties compare as multisets.
        for (std::size_t i = 1; i < mapped.size(); ++i) {
            CHECK(oracle::sort_key(mapped[i - 1]) <= oracle::sort_key(mapped[i]));
        }
        auto want = oracle::discrepancies(g, inst.schedule);
        auto full = [](const oracle::OracleDiscrepancy& a, const oracle::OracleDiscrepancy& b) {
            return std::tie(a.day, a.at, a.needed, a.med, a.kind) < std::tie(b.day, b.at, b.needed, b.med, b.kind);
        };
        std::sort(want.begin(), want.end(), full);
        auto have = mapped;
        std::sort(have.begin(), have.end(), full);
        CHECK(have == want);
        CHECK(units == oracle::cell_diff(g, inst.schedule));
        CHECK(got.empty() == (oracle::cell_diff(g, inst.schedule) == 0));
    }
}

TEST_CASE("apply_action") {
    const UserAction add{ActionKind::AddPill, "blue", {Weekday::Tuesday, Slot::Morning}, 0.0};
    const UserAction remove{ActionKind::RemovePill, "blue", {Weekday::Tuesday, Slot::Morning}, 1.0};
    const auto g1 = apply_action({}, add);
    CHECK(g1.count(add.cell()) == 1);
    CHECK(apply_action(g1, remove) == SortingGridState{});
    CHECK(code_of([&] { apply_action({}, remove); }) == ErrorCode::RemoveFromEmptyCell);
}

TEST_CASE("apply_action touches only its target and changes the total by one") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const auto inst = oracle::random_instance(rng);
        const auto& g = inst.scenario.initial_grid;
        const auto& med = inst.scenario.medications[rng() % inst.scenario.medications.size()].name;
        const UserAction a{rng() % 2 ? ActionKind::AddPill : ActionKind::RemovePill, med,
                           {oracle::kDays[rng() % 7], oracle::kSlots[rng() % 4]}, 0.0};
        if (a.kind == ActionKind::RemovePill && g.count(a.cell()) == 0) continue;
        const auto after = apply_action(g, a);
        CHECK(after.total() - g.total() == (a.kind == ActionKind::AddPill ? 1 : -1));
        for (const auto& m : oracle::medications_of(after, inst.schedule)) {
            for (auto d : oracle::kDays) {
                for (auto s : oracle::kSlots) {
                    const CellKey k{{d, s}, m};
                    if (k != a.cell()) CHECK(after.count(k) == g.count(k));
                }
            }
        }
    }
}

TEST_CASE("shipped scenario loads") {
    const auto sc = load_scenario_file(testpaths::data("scenarios/default.json"));
    CHECK(sc.medications.size() == 3);
    REQUIRE(sc.find_medication("lisinopril"));
    CHECK(sc.find_medication("lisinopril")->color == Color::Blue);
    CHECK(sc.goals == std::optional<std::string>("default_goals.json"));
    CHECK_FALSE(validate_grid(sc.initial_grid, sc.schedule()).empty());
}

TEST_CASE("scenario parsing errors") {
    const json base = testpaths::read_json(testpaths::data("scenarios/default.json"));
    CHECK(code_of([] { parse_scenario_text("{not json"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_scenario_text(""); }) == ErrorCode::ParseError);

    auto extra = base;
    extra["colour"] = "blue";
    CHECK(code_of([&] { parse_scenario(extra); }) == ErrorCode::ScenarioInvalid);

    auto dup = base;
    dup["medications"].push_back(dup["medications"][0]);
    CHECK(code_of([&] { parse_scenario(dup); }) == ErrorCode::ScenarioInvalid);

    auto bad_color = base;
    bad_color["medications"][0]["color"] = "teal";
    CHECK(code_of([&] { parse_scenario(bad_color); }) == ErrorCode::ScenarioInvalid);

    auto too_many = base;
    too_many["prescriptions"][0]["doses"][0]["count"] = 11;
    CHECK(code_of([&] { parse_scenario(too_many); }) == ErrorCode::ScenarioInvalid);

    auto no_dose = base;
    no_dose["prescriptions"][0]["doses"] = json::array({{{"day", "Monday"}, {"slot", "morning"}, {"count", 0}}});
    CHECK(code_of([&] { parse_scenario(no_dose); }) == ErrorCode::ScenarioInvalid);

    auto unknown_rx = base;
    unknown_rx["prescriptions"][0]["medication"] = "aspirin";
    CHECK(code_of([&] { parse_scenario(unknown_rx); }) == ErrorCode::UnknownMedication);

    auto not_earlier = base;
    not_earlier["events"] = json::array({{{"id", "x"},
                                          {"medication", "lisinopril"},
                                          {"day", "Monday"},
                                          {"from_slot", "morning"},
                                          {"to_slot", "evening"},
                                          {"description", "take earlier"}}});
    CHECK(code_of([&] { parse_scenario(not_earlier); }) == ErrorCode::ScenarioInvalid);

    auto undosed = base;
    undosed["events"] = json::array({{{"id", "x"},
                                      {"medication", "lisinopril"},
                                      {"day", "Monday"},
                                      {"from_slot", "bedtime"},
                                      {"to_slot", "morning"},
                                      {"description", "take earlier"}}});
    CHECK(code_of([&] { parse_scenario(undosed); }) == ErrorCode::EventWithoutBaseDose);

    auto negative = base;
    negative["initial_grid"] = json::array(
        {{{"day", "Monday"}, {"slot", "morning"}, {"medication", "lisinopril"}, {"count", -1}}});
    CHECK(code_of([&] { parse_scenario(negative); }) == ErrorCode::ScenarioInvalid);
}

TEST_CASE("cell json round-trip") {
    SortingGridState g;
    g.set(key(Weekday::Friday, Slot::Bedtime, "white"), 3);
    g.set(key(Weekday::Monday, Slot::Morning, "blue"), 1);
    const auto j = cells_to_json(g.cells());
    CHECK(j[0]["day"] == "Monday");
    CHECK(grid_from_json(j) == g);
}
