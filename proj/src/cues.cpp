#include "initrack/cues.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "initrack/errors.hpp"
#include "text_util.hpp"

namespace initrack {
namespace {

constexpr std::array<CueSpec, kCueCount> kSpecs{{
    {CueKind::ExplicitGiveup, "explicit_giveup", CueClass::Explicit, Effect::Both, Role::Hearer},
    {CueKind::ExplicitTakeover, "explicit_takeover", CueClass::Explicit, Effect::Both, Role::Speaker},
    {CueKind::EndSilence, "end_silence", CueClass::Discourse, Effect::Both, Role::Hearer},
    {CueKind::NoNewInfoRepetition, "no_new_info:repetition", CueClass::Discourse, Effect::Both,
     Role::Hearer},
    {CueKind::NoNewInfoPrompt, "no_new_info:prompt", CueClass::Discourse, Effect::Both, Role::Hearer},
    {CueKind::QuestionDomain, "question:domain", CueClass::Discourse, Effect::DialogueOnly,
     Role::Speaker},
    {CueKind::QuestionEvaluation, "question:evaluation", CueClass::Discourse, Effect::DialogueOnly,
     Role::Hearer},
    {CueKind::ObligationFulfilledTask, "obligation_fulfilled:task", CueClass::Discourse,
     Effect::Both, Role::Hearer},
    {CueKind::ObligationFulfilledDiscourse, "obligation_fulfilled:discourse", CueClass::Discourse,
     Effect::DialogueOnly, Role::Hearer},
    {CueKind::InvalidityAction, "invalidity:action", CueClass::Analytical, Effect::Both,
     Role::Hearer},
    {CueKind::InvalidityBelief, "invalidity:belief", CueClass::Analytical, Effect::DialogueOnly,
     Role::Hearer},
    {CueKind::Suboptimality, "suboptimality", CueClass::Analytical, Effect::Both, Role::Hearer},
    {CueKind::AmbiguityAction, "ambiguity:action", CueClass::Analytical, Effect::Both, Role::Hearer},
    {CueKind::AmbiguityBelief, "ambiguity:belief", CueClass::Analytical, Effect::DialogueOnly,
     Role::Hearer},
}};

static_assert([] {
    for (std::size_t i = 0; i < kSpecs.size(); ++i) {
        if (index_of(kSpecs[i].kind) != i) {
            return false;
        }
    }
    return true;
}());

}  // namespace

const char* to_string(CueClass c) noexcept {
    switch (c) {
        case CueClass::Explicit: return "explicit";
        case CueClass::Discourse: return "discourse";
        case CueClass::Analytical: return "analytical";
    }
    return "?";
}

const char* to_string(Effect e) noexcept {
    return e == Effect::Both ? "both" : "dialogue-only";
}

const char* to_string(Dimension d) noexcept {
    return d == Dimension::Task ? "task" : "dialogue";
}

std::span<const CueSpec, kCueCount> canonical_specs() noexcept { return kSpecs; }

const CueSpec& spec_of(CueKind kind) noexcept { return kSpecs[index_of(kind)]; }

std::string_view to_string(CueKind kind) noexcept { return spec_of(kind).name; }

std::optional<CueKind> find_cue(std::string_view token) noexcept {
    for (const auto& s : kSpecs) {
        if (s.name == token) {
            return s.kind;
        }
    }
    return std::nullopt;
}

CueKind parse_cue(std::string_view token) {
    if (auto k = find_cue(token)) {
        return *k;
    }
    throw ParseError({}, 0, fmt::format("unknown cue \"{}\"", token));
}

CueModel::CueModel() {
    for (const auto& s : kSpecs) {
        auto& p = params_[index_of(s.kind)];
        p.dialogue = BpaEntry{};
        if (s.effect == Effect::Both) {
            p.task = BpaEntry{};
        }
    }
}

const BpaEntry& CueModel::entry(CueKind kind, Dimension dim) const {
    const auto& p = params_[index_of(kind)];
    if (dim == Dimension::Dialogue) {
        return p.dialogue;
    }
    if (!p.task) {
        throw DomainError(fmt::format("cue {} has no task bpa", to_string(kind)));
    }
    return *p.task;
}

BpaEntry& CueModel::entry(CueKind kind, Dimension dim) {
    return const_cast<BpaEntry&>(std::as_const(*this).entry(kind, dim));
}

CueModel init_model() { return CueModel{}; }

void save_model(const CueModel& model, std::ostream& out) {
    out << kModelHeader << '\n';
    for (const auto& s : kSpecs) {
        for (Dimension dim : {Dimension::Task, Dimension::Dialogue}) {
            if (!affects(s.kind, dim)) {
                continue;
            }
            const auto& e = model.entry(s.kind, dim);
            out << fmt::format("cue={} dim={} m_speaker={:.17g} m_hearer={:.17g} m_theta={:.17g} "
                               "counter={}\n",
                               s.name, to_string(dim), e.bpa.speaker(), e.bpa.hearer(),
                               e.bpa.theta(), e.counter);
        }
    }
}

std::string model_to_string(const CueModel& model) {
    std::ostringstream os;
    save_model(model, os);
    return os.str();
}

CueModel load_model(std::istream& in, const std::string& source_name) {
    using detail::value_of;

    CueModel model;
    std::array<std::array<bool, 2>, kCueCount> seen{};
    bool have_header = false;
    std::size_t line_no = 0;
    std::string raw;

    const auto fail = [&](const std::string& msg) -> ParseError {
        return ParseError(source_name, line_no, msg);
    };

    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!have_header) {
            if (line != kModelHeader) {
                throw fail(fmt::format("expected header \"{}\"", kModelHeader));
            }
            have_header = true;
            continue;
        }

        const auto f = detail::fields(line);
        if (f.size() != 6) {
            throw fail("expected 6 fields: cue dim m_speaker m_hearer m_theta counter");
        }
        const auto cue_tok = value_of(f[0], "cue");
        const auto dim_tok = value_of(f[1], "dim");
        const auto s_tok = value_of(f[2], "m_speaker");
        const auto h_tok = value_of(f[3], "m_hearer");
        const auto t_tok = value_of(f[4], "m_theta");
        const auto c_tok = value_of(f[5], "counter");
        if (!cue_tok || !dim_tok || !s_tok || !h_tok || !t_tok || !c_tok) {
            throw fail("malformed model line");
        }

        const auto kind = find_cue(*cue_tok);
        if (!kind) {
            throw fail(fmt::format("unknown cue \"{}\"", *cue_tok));
        }
        Dimension dim;
        if (*dim_tok == "task") {
            dim = Dimension::Task;
        } else if (*dim_tok == "dialogue") {
            dim = Dimension::Dialogue;
        } else {
            throw fail(fmt::format("unknown dimension \"{}\"", *dim_tok));
        }
        if (!affects(*kind, dim)) {
            throw fail(fmt::format("cue {} carries no task bpa", *cue_tok));
        }
        auto& flag = seen[index_of(*kind)][dim == Dimension::Task ? 0 : 1];
        if (flag) {
            throw fail(fmt::format("duplicate entry for cue {} dim {}", *cue_tok, *dim_tok));
        }
        flag = true;

        const auto s = detail::parse_double(*s_tok);
        const auto h = detail::parse_double(*h_tok);
        const auto t = detail::parse_double(*t_tok);
        const auto c = detail::parse_int<std::int64_t>(*c_tok);
        if (!s || !h || !t || !c) {
            throw fail("malformed number");
        }
        try {
            model.entry(*kind, dim) = BpaEntry{MassFunction(*s, *h, *t), *c};
        } catch (const DomainError& e) {
            throw fail(e.what());
        }
    }

    if (!have_header) {
        throw fail("empty model file");
    }
    for (const auto& s : kSpecs) {
        for (Dimension dim : {Dimension::Task, Dimension::Dialogue}) {
            if (affects(s.kind, dim) && !seen[index_of(s.kind)][dim == Dimension::Task ? 0 : 1]) {
                throw fail(fmt::format("missing entry for cue {} dim {}", s.name, to_string(dim)));
            }
        }
    }
    return model;
}

CueModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, "cannot open model file");
    }
    return load_model(in, path);
}

void save_model_file(const CueModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write model file " + path);
    }
    save_model(model, out);
}

}  // namespace initrack
