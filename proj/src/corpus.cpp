#include "initrack/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "initrack/errors.hpp"
#include "text_util.hpp"

namespace initrack {

std::string Dialogue::pair_key() const {
    return pair.empty() ? agents[0] + "," + agents[1] : pair;
}

std::size_t Corpus::turn_count() const noexcept {
    std::size_t n = 0;
    for (const auto& d : dialogues) {
        n += d.turns.size();
    }
    return n;
}

std::size_t Corpus::prediction_points() const noexcept {
    std::size_t n = 0;
    for (const auto& d : dialogues) {
        n += d.turns.empty() ? 0 : d.turns.size() - 1;
    }
    return n;
}

namespace {

bool is_token(std::string_view s) {
    return !s.empty() && std::none_of(s.begin(), s.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',' || c == '=' || c == '#';
    });
}

// Returns an error message for the first invariant the dialogue header breaks.
std::optional<std::string> check_header(const Dialogue& d) {
    if (!is_token(d.id)) {
        return fmt::format("invalid dialogue id \"{}\"", d.id);
    }
    if (!is_token(d.agents[0]) || !is_token(d.agents[1]) || d.agents[0] == d.agents[1]) {
        return fmt::format("dialogue {}: agents must be two distinct tokens", d.id);
    }
    if (!d.pair.empty() && !is_token(d.pair)) {
        return fmt::format("dialogue {}: invalid pair key \"{}\"", d.id, d.pair);
    }
    return std::nullopt;
}

std::optional<std::string> check_turn(const Dialogue& d, const Turn& t, const Turn* prev) {
    const auto known = [&](const std::string& a) { return a == d.agents[0] || a == d.agents[1]; };
    for (const auto* a : {&t.speaker, &t.ti_holder, &t.di_holder}) {
        if (!known(*a)) {
            return fmt::format("unknown agent \"{}\" in dialogue {}", *a, d.id);
        }
    }
    if (prev != nullptr && prev->speaker == t.speaker) {
        return fmt::format("speaker \"{}\" takes two consecutive turns (speakers must alternate)",
                           t.speaker);
    }
    std::array<bool, kCueCount> seen{};
    for (CueKind c : t.cues) {
        if (seen[index_of(c)]) {
            return fmt::format("duplicate cue {}", to_string(c));
        }
        seen[index_of(c)] = true;
    }
    return std::nullopt;
}

}  // namespace

void validate(const Corpus& corpus) {
    if (!is_token(corpus.name)) {
        throw DomainError(fmt::format("invalid corpus name \"{}\"", corpus.name));
    }
    std::set<std::string> ids;
    for (const auto& d : corpus.dialogues) {
        if (auto err = check_header(d)) {
            throw DomainError(*err);
        }
        if (d.turns.empty()) {
            throw DomainError(fmt::format("dialogue {} has no turns", d.id));
        }
        if (!ids.insert(d.id).second) {
            throw DomainError(fmt::format("duplicate dialogue id {}", d.id));
        }
        const Turn* prev = nullptr;
        for (const auto& t : d.turns) {
            if (auto err = check_turn(d, t, prev)) {
                throw DomainError(*err);
            }
            prev = &t;
        }
    }
}

Role role_of(const Dialogue& dialogue, const Turn& turn, std::string_view agent) {
    if (agent != dialogue.agents[0] && agent != dialogue.agents[1]) {
        throw DomainError(fmt::format("agent \"{}\" is not part of dialogue {}", agent, dialogue.id));
    }
    return agent == turn.speaker ? Role::Speaker : Role::Hearer;
}

const std::string& agent_of(const Dialogue& dialogue, const Turn& turn, Role role) {
    return role == Role::Speaker ? turn.speaker : partner_of(dialogue, turn.speaker);
}

const std::string& partner_of(const Dialogue& dialogue, std::string_view agent) {
    if (agent == dialogue.agents[0]) {
        return dialogue.agents[1];
    }
    if (agent == dialogue.agents[1]) {
        return dialogue.agents[0];
    }
    throw DomainError(fmt::format("agent \"{}\" is not part of dialogue {}", agent, dialogue.id));
}

// ---------------------------------------------------------------------------

Corpus parse_corpus(std::istream& in, const std::string& source_name) {
    using detail::value_of;

    Corpus corpus;
    bool have_header = false;
    std::optional<Dialogue> open;
    std::size_t open_line = 0;
    std::set<std::string> ids;
    std::size_t line_no = 0;
    std::string raw;

    const auto fail = [&](const std::string& msg) { return ParseError(source_name, line_no, msg); };

    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto f = detail::fields(line);
        const auto keyword = f.front();

        if (!have_header) {
            if (keyword != "corpus" || f.size() != 2 || !is_token(f[1])) {
                throw fail("expected `corpus <name>` as the first line");
            }
            corpus.name = std::string(f[1]);
            have_header = true;
            continue;
        }

        if (keyword == "dialogue") {
            if (open) {
                throw fail(fmt::format("dialogue {} opened before `end` of dialogue {}",
                                       f.size() > 1 ? f[1] : "", open->id));
            }
            if (f.size() < 3 || f.size() > 4) {
                throw fail("expected `dialogue <id> agents=<a>,<b> [pair=<key>]`");
            }
            Dialogue d;
            d.id = std::string(f[1]);
            const auto agents = value_of(f[2], "agents");
            if (!agents) {
                throw fail("expected agents=<a>,<b>");
            }
            const auto parts = detail::split(*agents, ',');
            if (parts.size() != 2) {
                throw fail("agents must list exactly two agents");
            }
            d.agents = {std::string(parts[0]), std::string(parts[1])};
            if (f.size() == 4) {
                const auto pair = value_of(f[3], "pair");
                if (!pair) {
                    throw fail("expected pair=<key>");
                }
                d.pair = std::string(*pair);
            }
            if (auto err = check_header(d)) {
                throw fail(*err);
            }
            if (!ids.insert(d.id).second) {
                throw fail(fmt::format("duplicate dialogue id {}", d.id));
            }
            open = std::move(d);
            open_line = line_no;
        } else if (keyword == "turn") {
            if (!open) {
                throw fail("`turn` outside a dialogue");
            }
            if (f.size() != 5) {
                throw fail("expected `turn speaker=<a> ti=<a> di=<a> cues=<list>|-`");
            }
            const auto speaker = value_of(f[1], "speaker");
            const auto ti = value_of(f[2], "ti");
            const auto di = value_of(f[3], "di");
            const auto cues = value_of(f[4], "cues");
            if (!speaker || !ti || !di || !cues) {
                throw fail("expected `turn speaker=<a> ti=<a> di=<a> cues=<list>|-`");
            }
            Turn t{std::string(*speaker), std::string(*ti), std::string(*di), {}};
            if (*cues != "-") {
                for (auto tok : detail::split(*cues, ',')) {
                    const auto kind = find_cue(tok);
                    if (!kind) {
                        throw fail(fmt::format("unknown cue \"{}\"", tok));
                    }
                    t.cues.push_back(*kind);
                }
            }
            const Turn* prev = open->turns.empty() ? nullptr : &open->turns.back();
            if (auto err = check_turn(*open, t, prev)) {
                throw fail(*err);
            }
            open->turns.push_back(std::move(t));
        } else if (keyword == "end") {
            if (!open) {
                throw fail("`end` without an open dialogue");
            }
            if (f.size() != 1) {
                throw fail("unexpected text after `end`");
            }
            if (open->turns.empty()) {
                throw fail(fmt::format("dialogue {} has no turns", open->id));
            }
            corpus.dialogues.push_back(std::move(*open));
            open.reset();
        } else {
            throw fail(fmt::format("unknown directive \"{}\"", keyword));
        }
    }

    if (!have_header) {
        throw fail("empty corpus file");
    }
    if (open) {
        line_no = open_line;
        throw fail(fmt::format("dialogue {} is missing `end`", open->id));
    }
    return corpus;
}

Corpus parse_corpus_string(std::string_view text, const std::string& source_name) {
    std::istringstream in{std::string(text)};
    return parse_corpus(in, source_name);
}

Corpus load_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, "cannot open corpus file");
    }
    return parse_corpus(in, path);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    out << "corpus " << corpus.name << '\n';
    for (const auto& d : corpus.dialogues) {
        out << "dialogue " << d.id << " agents=" << d.agents[0] << ',' << d.agents[1];
        if (!d.pair.empty()) {
            out << " pair=" << d.pair;
        }
        out << '\n';
        for (const auto& t : d.turns) {
            out << "turn speaker=" << t.speaker << " ti=" << t.ti_holder << " di=" << t.di_holder
                << " cues=";
            if (t.cues.empty()) {
                out << '-';
            }
            for (std::size_t i = 0; i < t.cues.size(); ++i) {
                out << (i ? "," : "") << to_string(t.cues[i]);
            }
            out << '\n';
        }
        out << "end\n";
    }
}

std::string corpus_to_string(const Corpus& corpus) {
    std::ostringstream os;
    write_corpus(corpus, os);
    return os.str();
}

// ---------------------------------------------------------------------------

std::array<double, 4> DistributionReport::percentages() const noexcept {
    std::array<double, 4> out{};
    if (total == 0) {
        return out;
    }
    const auto c = cells();
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = 100.0 * static_cast<double>(c[i]) / static_cast<double>(total);
    }
    return out;
}

DistributionReport distribution_report(const Corpus& corpus, std::string_view focus_agent,
                                       TurnScope scope) {
    DistributionReport r;
    r.focus_agent = std::string(focus_agent);
    for (const auto& d : corpus.dialogues) {
        if (d.agents[0] != focus_agent && d.agents[1] != focus_agent) {
            throw DomainError(fmt::format("focus agent \"{}\" does not take part in dialogue {}",
                                          focus_agent, d.id));
        }
        const std::size_t first = scope == TurnScope::Scored ? 1 : 0;
        for (std::size_t i = first; i < d.turns.size(); ++i) {
            const auto& t = d.turns[i];
            const bool ti = t.ti_holder == focus_agent;
            const bool di = t.di_holder == focus_agent;
            if (ti && di) {
                ++r.both_focus;
            } else if (di) {
                ++r.dialogue_only_focus;
            } else if (ti) {
                ++r.task_only_focus;
            } else {
                ++r.neither_focus;
            }
            ++r.total;
        }
    }
    return r;
}

std::vector<std::pair<std::string, Corpus>> partition_by_pair(const Corpus& corpus) {
    std::map<std::string, Corpus> groups;
    for (const auto& d : corpus.dialogues) {
        auto [it, inserted] = groups.try_emplace(d.pair_key());
        if (inserted) {
            it->second.name = corpus.name;
        }
        it->second.dialogues.push_back(d);
    }
    return {std::make_move_iterator(groups.begin()), std::make_move_iterator(groups.end())};
}

}  // namespace initrack
