#pragma once

// Small hand-built corpora shared by the unit and acceptance tests.

#include <string>

#include "initrack/corpus.hpp"
#include "initrack/cues.hpp"

namespace fixtures {

// Two turns: A prompts, DI moves from A to B, TI stays with A.
inline const char* kPromptTrace = R"(corpus hand
dialogue d1 agents=A,B
turn speaker=A ti=A di=A cues=no_new_info:prompt
turn speaker=B ti=A di=B cues=-
end
)";

inline initrack::Corpus prompt_trace() { return initrack::parse_corpus_string(kPromptTrace); }

// `correct` two-turn dialogues where DI stays with the cue's speaker (the
// tie-to-speaker prediction is right), then `errors` where DI moves to the
// hearer. TI never moves.
inline initrack::Corpus counter_corpus(initrack::CueKind cue, int correct, int errors) {
    initrack::Corpus c;
    c.name = "counter";
    const auto make = [&](const std::string& id, const std::string& next_di) {
        initrack::Dialogue d;
        d.id = id;
        d.agents = {"A", "B"};
        d.turns.push_back({"A", "A", "A", {cue}});
        d.turns.push_back({"B", "A", next_di, {}});
        c.dialogues.push_back(std::move(d));
    };
    for (int i = 0; i < correct; ++i) {
        make("keep" + std::to_string(i), "A");
    }
    for (int i = 0; i < errors; ++i) {
        make("shift" + std::to_string(i), "B");
    }
    return c;
}

}  // namespace fixtures
