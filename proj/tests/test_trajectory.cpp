#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vragent/error.hpp"
#include "vragent/trajectory.hpp"

using namespace vragent;

namespace {

Observation retrieved(const std::string& page_id) {
    Observation o;
    o.kind = ObservationKind::RetrievedPage;
    o.page = PageRef{page_id, 1000, 1000};
    o.prompt_text = "look at " + page_id;
    return o;
}

Observation crop_result(const std::string& page_id) {
    Observation o;
    o.kind = ObservationKind::CropResult;
    o.page = PageRef{page_id, 1000, 1000};
    o.crop_box = std::array<int, 4>{572, 572, 928, 928};
    o.prompt_text = "zoomed view of " + page_id;
    return o;
}

Turn search_turn(const std::string& think, const std::string& query, Observation obs) {
    Turn t;
    t.response = make_response(think, Action::search(query));
    t.observation = std::move(obs);
    return t;
}

Turn answer_turn(const std::string& think, const std::string& text) {
    Turn t;
    t.response = make_response(think, Action::answer(text));
    return t;
}

}  // namespace

TEST_CASE("evidence first insertion") {
    EvidenceSpace ev;
    ev = update_evidence(ev, "p3", "chart shows 2010", EvidencePhase::PreCrop);
    REQUIRE(ev.size() == 1);
    CHECK(ev.entries()[0].page_id == "p3");
    CHECK(ev.entries()[0].pre == "chart shows 2010");
    CHECK_FALSE(ev.entries()[0].post.has_value());
}

TEST_CASE("evidence post after crop") {
    EvidenceSpace ev;
    ev.update("p3", "s", EvidencePhase::PreCrop);
    ev.update("p3", "cell value 41%", EvidencePhase::PostCrop);
    CHECK(ev.entries()[0].pre == "s");
    CHECK(*ev.entries()[0].post == "cell value 41%");
}

TEST_CASE("post without pre is an error") {
    EvidenceSpace ev;
    ev.update("p3", "s", EvidencePhase::PreCrop);
    CHECK_THROWS_AS(ev.update("p9", "x", EvidencePhase::PostCrop), Error);
    try {
        ev.update("p9", "x", EvidencePhase::PostCrop);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::PostCropWithoutPre);
    }
}

TEST_CASE("pre is never amended, post is overwritten") {
    EvidenceSpace ev;
    ev.update("p1", "first", EvidencePhase::PreCrop);
    ev.update("p1", "second", EvidencePhase::PreCrop);
    CHECK(ev.entries()[0].pre == "first");
    ev.update("p1", "crop a", EvidencePhase::PostCrop);
    ev.update("p1", "crop b", EvidencePhase::PostCrop);
    CHECK(*ev.entries()[0].post == "crop b");
}

TEST_CASE("evidence insertion order is preserved") {
    EvidenceSpace ev;
    ev.update("pz", "1", EvidencePhase::PreCrop);
    ev.update("pa", "2", EvidencePhase::PreCrop);
    ev.update("pm", "3", EvidencePhase::PreCrop);
    CHECK(ev.entries()[0].page_id == "pz");
    CHECK(ev.entries()[1].page_id == "pa");
    CHECK(ev.entries()[2].page_id == "pm");
}

TEST_CASE("evidence character cap") {
    EvidenceSpace ev;
    ev.update("p", std::string(100, 'x'), EvidencePhase::PreCrop, 10);
    CHECK(ev.entries()[0].pre.size() == 10);
}

TEST_CASE("append search turn extends history") {
    Trajectory traj;
    traj.query = {"q", "question", std::nullopt, {}};
    append_turn(traj, search_turn("t", "find p1", retrieved("p1")));
    CHECK(traj.retrieved_page_ids == std::vector<std::string>{"p1"});
    CHECK(traj.status == TrajectoryStatus::Running);
    CHECK(traj.turns.back().index == 1);
}

TEST_CASE("answer turn is terminal") {
    Trajectory traj;
    traj.query = {"q", "question", std::nullopt, {}};
    append_turn(traj, search_turn("t", "s", retrieved("p1")));
    append_turn(traj, answer_turn("done", "2010"));
    CHECK(traj.status == TrajectoryStatus::Answered);
    CHECK(*traj.final_answer == "2010");
    CHECK_THROWS_AS(append_turn(traj, answer_turn("again", "x")), Error);
}

TEST_CASE("forced answers get their own status") {
    Trajectory traj;
    traj.query = {"q", "question", std::nullopt, {}};
    append_turn(traj, search_turn("t", "s", retrieved("p1")));
    append_turn(traj, answer_turn("forced", "best guess"), /*forced=*/true);
    CHECK(traj.status == TrajectoryStatus::ForcedAnswered);
}

TEST_CASE("duplicate retrieval is rejected") {
    Trajectory traj;
    traj.query = {"q", "question", std::nullopt, {}};
    append_turn(traj, search_turn("a", "s", retrieved("p1")));
    CHECK_THROWS_AS(append_turn(traj, search_turn("b", "s", retrieved("p1"))), Error);
}

TEST_CASE("turn shape is validated") {
    Trajectory traj;
    traj.query = {"q", "question", std::nullopt, {}};
    Turn bad = answer_turn("t", "x");
    bad.observation = retrieved("p1");  // terminal turn must not observe
    CHECK_THROWS_AS(append_turn(traj, bad), Error);
    Turn missing = search_turn("t", "s", retrieved("p1"));
    missing.observation.reset();
    CHECK_THROWS_AS(append_turn(traj, missing), Error);
}

TEST_CASE("replay over a logged trajectory reproduces terminal state") {
    Trajectory traj;
    traj.query = {"q7", "what changed", std::string("2010"), {"p1", "p2"}};
    append_turn(traj, search_turn("find first", "s1", retrieved("p1")));
    traj.evidence.update("p1", "p1 shows a chart", EvidencePhase::PreCrop);
    Turn crop;
    crop.response = make_response("p1 shows a chart", Action::crop({100, 100, 200, 200}));
    crop.observation = crop_result("p1");
    append_turn(traj, crop);
    traj.evidence.update("p1", "cell is 41%", EvidencePhase::PostCrop);
    append_turn(traj, search_turn("cell is 41%", "s2", retrieved("p2")));
    traj.evidence.update("p2", "p2 confirms", EvidencePhase::PreCrop);
    append_turn(traj, answer_turn("p2 confirms", "2010"));

    // the manual evidence updates above mirror the loop's between-turn
    // rule, so replay must rebuild identical state from the turns alone
    Trajectory rebuilt = replay_trajectory(traj.query, traj.turns, traj.status);
    CHECK(rebuilt == traj);

    nlohmann::json j = to_json(traj);
    Trajectory parsed = trajectory_from_json(j);
    CHECK(parsed == traj);
    Trajectory replayed = replay_trajectory(parsed.query, parsed.turns, parsed.status);
    CHECK(replayed == traj);
    CHECK(to_json(replayed).dump() == j.dump());
}

TEST_CASE("json field names are fixed") {
    Trajectory traj;
    traj.query = {"q", "question", std::nullopt, {}};
    append_turn(traj, search_turn("t", "s", retrieved("p1")));
    append_turn(traj, answer_turn("d", "a"));
    nlohmann::json j = to_json(traj);
    for (const char* key :
         {"query", "turns", "evidence", "retrieved_page_ids", "status", "final_answer"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["status"] == "answered");
    // images are referenced, never inlined
    CHECK(j["turns"][0]["observation"]["page"]["page_id"] == "p1");
}

TEST_CASE("evidence keys stay within retrieved pages") {
    Trajectory traj;
    traj.query = {"q", "question", std::nullopt, {}};
    append_turn(traj, search_turn("a", "s1", retrieved("p1")));
    traj.evidence.update("p1", "note", EvidencePhase::PreCrop);
    append_turn(traj, search_turn("note", "s2", retrieved("p2")));
    traj.evidence.update("p2", "note2", EvidencePhase::PreCrop);
    for (const auto& e : traj.evidence.entries()) {
        CHECK(traj.has_retrieved(e.page_id));
    }
}
