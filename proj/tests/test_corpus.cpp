#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "initrack/corpus.hpp"
#include "initrack/errors.hpp"
#include "initrack/evalstats.hpp"
#include "initrack/synthetic.hpp"
#include "support.hpp"

using namespace initrack;

namespace {

const char* kSample = R"(corpus demo
dialogue d1 agents=system,manager
turn speaker=manager ti=manager di=manager cues=question:domain
turn speaker=system ti=manager di=manager cues=no_new_info:prompt
end
)";

std::size_t error_line(const std::string& text) {
    try {
        parse_corpus_string(text, "bad.dti");
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

GeneratorConfig small_config() {
    GeneratorConfig c;
    c.dialogues = 2;
    c.turns_per_dialogue = 10;
    c.cue_probability.fill(0.15);
    c.rules = table_rules(0.8);
    c.task_noise = 0.05;
    c.dialogue_noise = 0.1;
    return c;
}

}  // namespace

TEST_CASE("parse the sample corpus") {
    const auto c = parse_corpus_string(kSample);
    CHECK(c.name == "demo");
    REQUIRE(c.dialogues.size() == 1);
    const auto& d = c.dialogues[0];
    CHECK(d.id == "d1");
    CHECK(d.agents[0] == "system");
    CHECK(d.agents[1] == "manager");
    REQUIRE(d.turns.size() == 2);
    CHECK(d.turns[0].cues == std::vector{CueKind::QuestionDomain});
    CHECK(d.turns[1].speaker == "system");
    CHECK(c.turn_count() == 2);
    CHECK(c.prediction_points() == 1);
    CHECK(d.pair_key() == "system,manager");
}

TEST_CASE("parse errors are line-numbered") {
    std::string s = kSample;
    CHECK(error_line(std::string(s).replace(s.find("no_new_info:prompt"), 18, "promptz")) == 4);
    try {
        parse_corpus_string(std::string(s).replace(s.find("no_new_info:prompt"), 18, "promptz"),
                            "bad.dti");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("promptz") != std::string::npos);
        CHECK(std::string(e.what()).find("bad.dti:4") != std::string::npos);
    }
    // alternation
    CHECK(error_line(std::string(s).replace(s.find("speaker=system"), 14, "speaker=manager")) == 4);
    // foreign agent
    CHECK(error_line(std::string(s).replace(s.find("di=manager cues=no"), 10, "di=robot   ")) == 4);
    // empty dialogue
    CHECK(error_line("corpus x\ndialogue d1 agents=a,b\nend\n") == 3);
    // duplicate id
    CHECK(error_line(s + "dialogue d1 agents=system,manager\n"
                         "turn speaker=system ti=system di=system cues=-\nend\n") == 6);
    // missing end
    CHECK(error_line("corpus x\ndialogue d1 agents=a,b\nturn speaker=a ti=a di=a cues=-\n") == 2);
    // duplicate cue on a turn
    CHECK(error_line("corpus x\ndialogue d1 agents=a,b\n"
                     "turn speaker=a ti=a di=a cues=end_silence,end_silence\nend\n") == 3);
    CHECK(error_line("dialogue d1 agents=a,b\n") == 1);
}

TEST_CASE("round trip on generated corpora") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto config = small_config();
        config.pairs = 1 + seed % 3;
        const auto c = gen_synthetic(config, seed);
        CHECK_NOTHROW(validate(c));
        const auto text = corpus_to_string(c);
        const auto back = parse_corpus_string(text);
        CHECK(back == c);
        CHECK(corpus_to_string(back) == text);
    }
}

TEST_CASE("distribution report") {
    SUBCASE("one agent holds everything") {
        const auto c = parse_corpus_string(
            "corpus x\ndialogue d agents=a,b\n"
            "turn speaker=a ti=a di=a cues=-\nturn speaker=b ti=a di=a cues=-\n"
            "turn speaker=a ti=a di=a cues=-\nend\n");
        const auto r = distribution_report(c, "a");
        CHECK(r.cells() == std::array<std::size_t, 4>{3, 0, 0, 0});
        CHECK(r.total == 3);
    }
    SUBCASE("four cells once each") {
        const auto c = parse_corpus_string(
            "corpus x\ndialogue d agents=a,b\n"
            "turn speaker=a ti=a di=a cues=-\nturn speaker=b ti=a di=b cues=-\n"
            "turn speaker=a ti=b di=a cues=-\nturn speaker=b ti=b di=b cues=-\nend\n");
        const auto r = distribution_report(c, "a");
        CHECK(r.cells() == std::array<std::size_t, 4>{1, 1, 1, 1});
        for (double p : r.percentages()) {
            CHECK(p == 25.0);
        }
        CHECK(r.task_only_focus == 1);
        CHECK(r.dialogue_only_focus == 1);
    }
    SUBCASE("foreign focus agent") {
        CHECK_THROWS_AS(distribution_report(parse_corpus_string(kSample), "robot"), DomainError);
    }
    SUBCASE("replica corpus") {
        const auto c = load_corpus_file(testsupport::data_path("trains91_replica.dti"));
        const auto r = distribution_report(c, "system");
        CHECK(r.cells() == std::array<std::size_t, 4>{37, 274, 4, 727});
        CHECK(r.total == 1042);
        CHECK(r.task_focus() == 41);
        CHECK(r.dialogue_focus() == 311);
    }
}

TEST_CASE("distribution counts always sum to the total") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto c = gen_synthetic(small_config(), seed);
        for (auto scope : {TurnScope::All, TurnScope::Scored}) {
            const auto r = distribution_report(c, "system", scope);
            const auto cells = r.cells();
            CHECK(cells[0] + cells[1] + cells[2] + cells[3] == r.total);
            CHECK(r.total == (scope == TurnScope::All ? c.turn_count() : c.prediction_points()));
        }
    }
}

TEST_CASE("partition_by_pair") {
    auto config = small_config();
    config.dialogues = 16;
    config.pairs = 8;
    const auto c = gen_synthetic(config, 3);
    const auto groups = partition_by_pair(c);
    REQUIRE(groups.size() == 8);
    std::size_t total = 0;
    std::map<std::string, int> seen;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (i > 0) {
            CHECK(groups[i - 1].first < groups[i].first);
        }
        for (const auto& d : groups[i].second.dialogues) {
            CHECK(d.pair_key() == groups[i].first);
            ++seen[d.id];
        }
        total += groups[i].second.dialogues.size();
    }
    CHECK(total == c.dialogues.size());
    CHECK(seen.size() == c.dialogues.size());

    config.pairs = 1;
    CHECK(partition_by_pair(gen_synthetic(config, 3)).size() == 1);
}

TEST_CASE("role_of and agent_of") {
    const auto c = parse_corpus_string(kSample);
    const auto& d = c.dialogues[0];
    const auto& t = d.turns[0];
    CHECK(role_of(d, t, "manager") == Role::Speaker);
    CHECK(role_of(d, t, "system") == Role::Hearer);
    CHECK(agent_of(d, t, Role::Hearer) == "system");
    CHECK_THROWS_AS(role_of(d, t, "robot"), DomainError);
    CHECK(partner_of(d, "system") == "manager");

    const auto g = gen_synthetic(small_config(), 9);
    for (const auto& dd : g.dialogues) {
        for (const auto& tt : dd.turns) {
            for (Role r : {Role::Speaker, Role::Hearer}) {
                CHECK(role_of(dd, tt, agent_of(dd, tt, r)) == r);
            }
            for (const auto& a : dd.agents) {
                CHECK(agent_of(dd, tt, role_of(dd, tt, a)) == a);
            }
        }
    }
}

TEST_CASE("generator") {
    SUBCASE("deterministic per seed") {
        CHECK(corpus_to_string(gen_synthetic(small_config(), 42)) ==
              corpus_to_string(gen_synthetic(small_config(), 42)));
        CHECK(corpus_to_string(gen_synthetic(small_config(), 42)) !=
              corpus_to_string(gen_synthetic(small_config(), 43)));
    }
    SUBCASE("a certain prompt rule hands DI to the hearer") {
        GeneratorConfig c;
        c.dialogues = 10;
        c.turns_per_dialogue = 30;
        c.cue_probability[index_of(CueKind::NoNewInfoPrompt)] = 0.4;
        c.rules = {{CueKind::NoNewInfoPrompt, Dimension::Dialogue, Role::Hearer, 1.0}};
        c.dialogue_noise = 0.3;
        const auto corpus = gen_synthetic(c, 5);
        int prompts = 0;
        for (const auto& d : corpus.dialogues) {
            for (std::size_t i = 0; i + 1 < d.turns.size(); ++i) {
                const auto& t = d.turns[i];
                if (std::find(t.cues.begin(), t.cues.end(), CueKind::NoNewInfoPrompt) !=
                    t.cues.end()) {
                    ++prompts;
                    CHECK(d.turns[i + 1].di_holder == agent_of(d, t, Role::Hearer));
                }
            }
        }
        CHECK(prompts > 20);
    }
    SUBCASE("no cues: cue-based tracking behaves like the baseline") {
        auto c = small_config();
        c.cue_probability.fill(0.0);
        const auto corpus = gen_synthetic(c, 8);
        TrackerConfig tc;
        tc.anchor_first_turn = true;
        const auto trained = train(corpus, tc);
        const auto base = baseline_run(corpus);
        const auto eval = evaluate(corpus, trained.model, tc);
        CHECK(eval.task_correct == base.task_correct);
        CHECK(eval.dialogue_correct == base.dialogue_correct);
    }
    SUBCASE("invalid configurations") {
        auto c = small_config();
        c.cue_probability[0] = 1.5;
        CHECK_THROWS_AS(gen_synthetic(c, 1), DomainError);
        c = small_config();
        c.dialogue_noise = -0.1;
        CHECK_THROWS_AS(gen_synthetic(c, 1), DomainError);
        c = small_config();
        c.rules.push_back({CueKind::QuestionDomain, Dimension::Task, Role::Speaker, 0.5});
        CHECK_THROWS_AS(gen_synthetic(c, 1), DomainError);
        c = small_config();
        c.dialogues = 0;
        CHECK_THROWS_AS(gen_synthetic(c, 1), DomainError);
    }
}

TEST_CASE("replica construction meets its targets") {
    ReplicaTargets t;
    t.dialogues = 4;
    t.pairs = 2;
    t.cells = {5, 20, 2, 53};
    t.task_keeps = 70;
    t.dialogue_keeps = 60;
    t.cue_rate = 0.5;
    const auto c = construct_replica(t, 11);
    CHECK_NOTHROW(validate(c));
    CHECK(c.turn_count() == 80);
    CHECK(distribution_report(c, "system").cells() == t.cells);
    const auto base = baseline_run(c);
    CHECK(base.correct(Dimension::Task) == 70);
    CHECK(base.correct(Dimension::Dialogue) == 60);
    CHECK(partition_by_pair(c).size() == 2);
}

TEST_CASE("shipped baseline replica") {
    const auto c = load_corpus_file(testsupport::data_path("trains91_baseline_replica.dti"));
    CHECK(c.prediction_points() == 1042);
    const auto base = baseline_run(c);
    CHECK(base.correct(Dimension::Task) == 1009);
    CHECK(base.correct(Dimension::Dialogue) == 780);
    CHECK(partition_by_pair(c).size() == 8);
}
