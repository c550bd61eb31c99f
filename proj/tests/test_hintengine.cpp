#include <doctest.h>

#include <functional>

#include "aide/hintengine.hpp"
#include "support/paths.hpp"

using namespace aide;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an aide::Error");
    return ErrorCode::InvalidArgument;
}

const AssistanceCatalog& catalog() {
    static const auto c = load_catalog_file(testpaths::data("catalog/default.json"));
    return c;
}

const std::vector<Medication> kMeds{{"blue", Color::Blue, Shape::Round}, {"white", Color::White, Shape::Oval}};

CellKey key(Weekday d, Slot s, const std::string& med) { return CellKey{{d, s}, med}; }

NeedEstimate need(int level) {
    NeedEstimate n;
    n.level = level;
    return n;
}

std::string hint(const Plan& plan, int level) {
    return select_assistance(plan, need(level), false, catalog(), kMeds, 0)->utterance;
}

JustifiedAction step_of(ActionKind kind, MethodName leaf) {
    JustifiedAction s;
    s.action = PlannedAction{kind, "blue", {Weekday::Tuesday, Slot::Morning}};
    s.justification = {TaskLink{TaskName::SortMedications, std::nullopt, std::nullopt},
                       TaskLink{TaskName::FixDiscrepancy, leaf, std::nullopt}};
    return s;
}

}  // namespace

TEST_CASE("shipped catalog is complete") {
    CHECK(missing_catalog_keys(catalog()).empty());
    CHECK(required_catalog_keys().size() == 12);
    CHECK_FALSE(catalog().encouragements.empty());
}

TEST_CASE("too many blue pills on Tuesday morning") {
    Schedule s;
    s.set(key(Weekday::Tuesday, Slot::Morning, "blue"), 1);
    SortingGridState g;
    g.set(key(Weekday::Tuesday, Slot::Morning, "blue"), 2);
    const auto plan = build_plan(g, s);
    REQUIRE(plan.steps[0].leaf_method() == MethodName::ExtraPill);
    CHECK(hint(plan, 3) == "There are too many blue pills on Tuesday morning");
}

TEST_CASE("missing a pill on Tuesday") {
    Schedule s;
    s.set(key(Weekday::Tuesday, Slot::Morning, "blue"), 1);
    const auto plan = build_plan({}, s);
    REQUIRE(plan.steps[0].leaf_method() == MethodName::MissingPill);
    CHECK(hint(plan, 3) == "You are missing a pill on Tuesday");
}

TEST_CASE("a pill at the wrong time on Tuesday") {
    Schedule s;
    s.set(key(Weekday::Tuesday, Slot::Morning, "blue"), 1);
    SortingGridState g;
    g.set(key(Weekday::Tuesday, Slot::Evening, "blue"), 1);
    const auto plan = build_plan(g, s);
    REQUIRE(plan.size() == 2);
    CHECK(hint(plan, 3) == "You have a pill at the wrong time on Tuesday");
    // The add half of the same wrong_time pair.
    Plan tail;
    tail.steps = {plan.steps[1]};
    REQUIRE(tail.steps[0].action.kind == ActionKind::AddPill);
    CHECK(hint(tail, 3) == "You have a pill at the wrong time on Tuesday");
}

TEST_CASE("need 0 with progress says Good job") {
    const auto a = select_assistance(Plan{}, need(0), true, catalog(), kMeds, 0);
    REQUIRE(a);
    CHECK(a->utterance == "Good job");
    CHECK(a->level == 0);
    CHECK_FALSE(a->refers_to.has_value());
    CHECK_FALSE(a->gesture.has_value());
}

TEST_CASE("encouragements rotate with the counter") {
    for (std::size_t i = 0; i < 7; ++i) {
        const auto a = select_assistance(Plan{}, need(0), true, catalog(), kMeds, i);
        CHECK(a->utterance == catalog().encouragements[i % catalog().encouragements.size()]);
    }
}

TEST_CASE("need 0 without progress is silent") {
    Schedule s;
    s.set(key(Weekday::Tuesday, Slot::Morning, "blue"), 1);
    CHECK_FALSE(select_assistance(build_plan({}, s), need(0), false, catalog(), kMeds, 0).has_value());
}

TEST_CASE("an empty plan never gets a directive hint") {
    for (int level = 1; level <= 3; ++level) {
        const auto a = select_assistance(Plan{}, need(level), false, catalog(), kMeds, 0);
        REQUIRE(a);
        CHECK(a->level == 0);
        CHECK_FALSE(a->refers_to.has_value());
    }
}

TEST_CASE("level 2 missing_pill hint is the non-directive question") {
    Schedule s;
    s.set(key(Weekday::Tuesday, Slot::Morning, "blue"), 1);
    const auto a = select_assistance(build_plan({}, s), need(2), false, catalog(), kMeds, 0);
    CHECK(a->utterance == "How does Tuesday look?");
    CHECK(a->gesture == std::optional<std::string>("glance_at_grid"));
}

TEST_CASE("exhaustive level x justification x kind grid") {
    const std::vector<std::pair<ActionKind, MethodName>> pairs{{ActionKind::AddPill, MethodName::MissingPill},
                                                               {ActionKind::AddPill, MethodName::WrongTime},
                                                               {ActionKind::RemovePill, MethodName::ExtraPill},
                                                               {ActionKind::RemovePill, MethodName::WrongTime}};
    int checked = 0;
    for (const auto& [kind, leaf] : pairs) {
        for (int level = 1; level <= 3; ++level) {
            Plan plan;
            plan.steps = {step_of(kind, leaf)};
            const auto a = select_assistance(plan, need(level), false, catalog(), kMeds, 0);
            REQUIRE(a);
            CHECK(a->level == level);
            CHECK(a->refers_to == next_step(plan));
            CHECK(a->utterance.find('{') == std::string::npos);
            const auto* t = find_template(catalog(), kind, justification_of(leaf), level);
            REQUIRE(t);
            if (level >= 2) CHECK(t->justification == justification_of(leaf));
            ++checked;
        }
    }
    CHECK(checked == 12);
}

TEST_CASE("level 1 may fall back to a none-justified prompt") {
    const auto* t = find_template(catalog(), ActionKind::AddPill, Justification::MissingPill, 1);
    REQUIRE(t);
    CHECK(t->justification == Justification::None);
    CHECK(find_template(catalog(), ActionKind::AddPill, Justification::ExtraPill, 2) == nullptr);
}

TEST_CASE("render") {
    const auto step = step_of(ActionKind::RemovePill, MethodName::ExtraPill);
    AssistiveActionTemplate t;
    t.text = "There are too many {color} pills on {day} {slot}";
    CHECK(render(t, step, kMeds) == "There are too many blue pills on Tuesday morning");
    t.text = "Nothing to fill in";
    CHECK(render(t, step, kMeds) == "Nothing to fill in");
    t.text = "{med} is {shape}";
    CHECK(render(t, step, kMeds) == "blue is round");
    t.text = "The {color} one";
    CHECK(code_of([&] { render(t, step, std::vector<Medication>{}); }) == ErrorCode::UnresolvedPlaceholder);
    t.text = "The {size} one";
    CHECK(code_of([&] { render(t, step, kMeds); }) == ErrorCode::UnresolvedPlaceholder);
}

TEST_CASE("rendering is deterministic") {
    const auto step = step_of(ActionKind::AddPill, MethodName::WrongTime);
    for (const auto& t : catalog().entries) CHECK(render(t, step, kMeds) == render(t, step, kMeds));
}

TEST_CASE("catalog loading errors") {
    CHECK(code_of([] { parse_catalog_text(""); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_catalog_text("[]"); }) == ErrorCode::ParseError);
    try {
        load_catalog_file(testpaths::fixture("catalog_gap.json"));
        FAIL("gap not detected");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CatalogGap);
        REQUIRE(e.detail().is_array());
        REQUIRE(e.detail().size() == 1);
        CHECK(e.detail()[0] == json{{"action_kind", "add_pill"}, {"justification", "missing_pill"}, {"level", 2}});
        CHECK(std::string(e.what()).find("(add_pill, missing_pill, 2)") != std::string::npos);
    }
    auto doc = testpaths::read_json(testpaths::data("catalog/default.json"));
    doc["encouragements"] = json::array();
    CHECK(code_of([&] { parse_catalog(doc); }) == ErrorCode::ParseError);
    doc = testpaths::read_json(testpaths::data("catalog/default.json"));
    doc["entries"][0]["template"] = "Uses {nonsense}";
    CHECK(code_of([&] { parse_catalog(doc); }) == ErrorCode::ParseError);
    doc = testpaths::read_json(testpaths::data("catalog/default.json"));
    doc["entries"][0]["level"] = 4;
    CHECK(code_of([&] { parse_catalog(doc); }) == ErrorCode::ParseError);
}

TEST_CASE("assistance json round-trip") {
    Plan plan;
    plan.steps = {step_of(ActionKind::RemovePill, MethodName::WrongTime)};
    const auto a = *select_assistance(plan, need(3), false, catalog(), kMeds, 0);
    CHECK(assistance_from_json(to_json(a)) == a);
}
