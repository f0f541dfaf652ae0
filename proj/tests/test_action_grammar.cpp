#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "vragent/action.hpp"

using namespace vragent;

TEST_CASE("canonical search response parses") {
    auto out = parse_response(
        "<think>need the 2010 chart</think><search>Amazon fulfillment centers 50</search>");
    REQUIRE(out.valid());
    CHECK(out.response->think == "need the 2010 chart");
    CHECK(out.response->action == Action::search("Amazon fulfillment centers 50"));
    CHECK(out.response->raw_text ==
          "<think>need the 2010 chart</think><search>Amazon fulfillment centers 50</search>");
}

TEST_CASE("action without think is MissingThink") {
    auto out = parse_response("<search>q</search>");
    REQUIRE_FALSE(out.valid());
    CHECK(*out.reason == InvalidReason::MissingThink);
}

TEST_CASE("empty and whitespace-only think are MissingThink") {
    CHECK(*parse_response("").reason == InvalidReason::MissingThink);
    CHECK(*parse_response("<think>   </think><search>q</search>").reason ==
          InvalidReason::MissingThink);
    CHECK(*parse_response("junk <think>t</think><search>q</search>").reason ==
          InvalidReason::MissingThink);
}

TEST_CASE("inverted bbox is MalformedBbox") {
    auto out = parse_response("<think>t</think><bbox>[100, 100, 50, 400]</bbox>");
    REQUIRE_FALSE(out.valid());
    CHECK(*out.reason == InvalidReason::MalformedBbox);
}

TEST_CASE("full-image crop is syntactically valid") {
    auto out = parse_response("<think>t</think><bbox>[0, 0, 1000, 1000]</bbox>",
                              DisplayedSpace{1000, 1000});
    REQUIRE(out.valid());
    CHECK(out.response->action == Action::crop({0, 0, 1000, 1000}));
}

TEST_CASE("bbox payload forms") {
    CHECK(parse_response("<think>t</think><bbox>1,2,3,4</bbox>").valid());  // bare list
    CHECK(parse_response("<think>t</think><bbox>[ 1 , 2 , 3 , 4 ]</bbox>").valid());
    CHECK(*parse_response("<think>t</think><bbox>[1,2,3]</bbox>").reason ==
          InvalidReason::MalformedBbox);
    CHECK(*parse_response("<think>t</think><bbox>[1.5, 2, 3, 4]</bbox>").reason ==
          InvalidReason::MalformedBbox);
    CHECK(*parse_response("<think>t</think><bbox>[1,2,3,4</bbox>").reason ==
          InvalidReason::MalformedBbox);  // unbalanced bracket
    CHECK(*parse_response("<think>t</think><bbox>[-5, 0, 10, 10]</bbox>").reason ==
          InvalidReason::MalformedBbox);  // out of space
    CHECK(*parse_response("<think>t</think><bbox>[0, 0, 1200, 10]</bbox>").reason ==
          InvalidReason::MalformedBbox);
    CHECK(*parse_response("<think>t</think><bbox></bbox>").reason == InvalidReason::EmptyPayload);
}

TEST_CASE("no action and multiple actions") {
    CHECK(*parse_response("<think>t</think>").reason == InvalidReason::NoActionTag);
    CHECK(*parse_response("<think>t</think><search>q").reason == InvalidReason::NoActionTag);
    CHECK(*parse_response("<think>t</think><search>a</search><answer>b</answer>").reason ==
          InvalidReason::MultipleActions);
    CHECK(*parse_response("<think>t</think><answer>use <search>x</search></answer>").reason ==
          InvalidReason::MultipleActions);
}

TEST_CASE("payload and garbage rules") {
    CHECK(*parse_response("<think>t</think><search>   </search>").reason ==
          InvalidReason::EmptyPayload);
    CHECK(*parse_response("<think>t</think><answer></answer>").reason ==
          InvalidReason::EmptyPayload);
    CHECK(*parse_response("<think>t</think><search>q</search> residue").reason ==
          InvalidReason::TrailingGarbage);
    CHECK(*parse_response("<think>t</think> hello <search>q</search>").reason ==
          InvalidReason::TrailingGarbage);
    // whitespace residue is tolerated
    CHECK(parse_response("  <think>t</think>\n<search>q</search>\n\n").valid());
}

TEST_CASE("tags are case-sensitive lowercase") {
    CHECK(*parse_response("<think>t</think><Search>q</Search>").reason ==
          InvalidReason::NoActionTag);
    CHECK(*parse_response("<Think>t</Think><search>q</search>").reason ==
          InvalidReason::MissingThink);
}

TEST_CASE("contiguous think blocks merge, detached ones do not") {
    auto out = parse_response("<think>a</think><think>b</think><search>q</search>");
    REQUIRE(out.valid());
    CHECK(out.response->think == "a\nb");
    CHECK(*parse_response("<think>a</think><search>q</search><think>b</think>").reason ==
          InvalidReason::TrailingGarbage);
}

TEST_CASE("action tags inside the think payload are payload") {
    auto out = parse_response("<think>maybe <search>x</search> later</think><answer>y</answer>");
    REQUIRE(out.valid());
    CHECK(out.response->action == Action::answer("y"));
}

TEST_CASE("render_action fixed forms") {
    CHECK(render_action(Action::search("q")) == "<search>q</search>");
    CHECK(render_action(Action::crop({72, 72, 228, 228})) == "<bbox>[72, 72, 228, 228]</bbox>");
    CHECK(render_action(Action::answer("2010")) == "<answer>2010</answer>");
}

TEST_CASE("round trip: parse(render(r)) == Valid(r)") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int> coord(0, 999);
    std::uniform_int_distribution<int> len(1, 12);
    auto word = [&] {
        static const char* words[] = {"chart", "2010", "total", "page", "value", "affine"};
        return std::string(words[rng() % 6]);
    };
    auto text = [&] {
        std::string s = word();
        int n = len(rng);
        for (int i = 0; i < n; ++i) s += " " + word();
        return s;
    };
    for (int i = 0; i < 500; ++i) {
        Action a;
        switch (kind(rng)) {
            case 0: a = Action::search(text()); break;
            case 1: {
                int x1 = coord(rng), y1 = coord(rng);
                int x2 = x1 + 1 + coord(rng) % (1000 - x1);
                int y2 = y1 + 1 + coord(rng) % (1000 - y1);
                a = Action::crop({x1, y1, x2, y2});
                break;
            }
            default: a = Action::answer(text()); break;
        }
        AgentResponse r = make_response(text(), a);
        auto out = parse_response(r.raw_text);
        REQUIRE(out.valid());
        CHECK(*out.response == r);
    }
}

TEST_CASE("parser is total on adversarial input") {
    std::mt19937 rng(99);
    const std::string alphabet = "<>/thinkseabrncw[],0123456789 \n\t";
    std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 120);
    for (int i = 0; i < 3000; ++i) {
        std::string s;
        int n = len(rng);
        for (int j = 0; j < n; ++j) s += alphabet[pick(rng)];
        auto out = parse_response(s);  // must not throw or crash
        if (out.valid()) {
            CHECK_FALSE(out.response->think.empty());
        } else {
            CHECK(out.reason.has_value());
        }
    }
}
