#include <doctest.h>

#include <random>
#include <stdexcept>

#include "apx/action_pattern.hpp"
#include "apx/labels.hpp"

using namespace apx;

TEST_CASE("normalize_label strips punctuation and case") {
    CHECK(normalize_label(" Knife.") == "knife");
    CHECK(normalize_label("next  to") == "next to");
    CHECK(normalize_label("OVEN") == "oven");
    CHECK(normalize_label("\"quoted\"") == "quoted");
    CHECK(normalize_label("(bowl)") == "bowl");
    CHECK(normalize_label("  ") == "");
    CHECK(normalize_label("...") == "");
    CHECK(normalize_label("") == "");
    CHECK(normalize_label("bread maker") == "bread maker");
    CHECK(normalize_label("\tBread\nMaker\t") == "bread maker");
}

TEST_CASE("normalize_label is idempotent on random inputs") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<int> len(0, 24);
    std::uniform_int_distribution<int> chr(32, 126);
    for (int i = 0; i < 2000; ++i) {
        std::string raw;
        int n = len(rng);
        for (int j = 0; j < n; ++j) raw.push_back(static_cast<char>(chr(rng)));
        Label once = normalize_label(raw);
        CHECK(normalize_label(once) == once);
    }
}

TEST_CASE("normalize_unique drops empties and duplicates, keeps order") {
    auto labels = normalize_unique({"Knife", " knife.", "", "Fork", "KEY", "fork"});
    CHECK(labels == std::vector<Label>{"knife", "fork", "key"});
}

TEST_CASE("validate_pattern accepts a minimal valid pattern") {
    ActionPattern p;
    p.action = "bake";
    p.agents = {"robot"};
    p.objects = {"bread"};
    CHECK(validate_pattern(p).empty());
}

TEST_CASE("validate_pattern reports empty agents") {
    ActionPattern p;
    p.action = "bake";
    p.objects = {"bread"};
    auto violations = validate_pattern(p);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "agents must be non-empty");
}

TEST_CASE("validate_pattern reports duplicate tools") {
    ActionPattern p;
    p.action = "cut";
    p.agents = {"person"};
    p.objects = {"bread"};
    p.tools = {"knife", "knife"};
    auto violations = validate_pattern(p);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "duplicate label in tools: 'knife'");
}

TEST_CASE("validate_pattern rejects non-normalized and empty labels") {
    ActionPattern p;
    p.action = "Cut";
    p.agents = {"person"};
    p.objects = {""};
    auto violations = validate_pattern(p);
    CHECK(violations.size() == 2);
}

TEST_CASE("validate_pattern checks spatial relation fields") {
    ActionPattern p;
    p.action = "cut";
    p.agents = {"person"};
    p.objects = {"bread"};
    p.spatial_relations.push_back({"bread", "", "knife", false});
    auto violations = validate_pattern(p);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "spatial relation fields must be non-empty");
}

TEST_CASE("extraction kind round trips through names") {
    for (auto kind : {ExtractionKind::Tool, ExtractionKind::StateBefore,
                      ExtractionKind::StateAfter, ExtractionKind::Spatial}) {
        CHECK(extraction_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(extraction_kind_from_string("tools"), std::invalid_argument);
}
