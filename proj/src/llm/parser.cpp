#include "mind/llm/parser.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

namespace mind::llm {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return s;
}

// Pull the first JSON object out of a reply that may carry fences or prose.
json extract_json(const std::string& raw, std::string& error) {
    json direct = json::parse(raw, nullptr, false);
    if (!direct.is_discarded() && direct.is_object()) return direct;
    size_t open = raw.find('{');
    size_t close = raw.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        error = "reply contains no JSON object";
        return json();
    }
    json body = json::parse(raw.substr(open, close - open + 1), nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        error = "reply is not valid JSON";
        return json();
    }
    return body;
}

std::string allowed_list(const ConstraintItem& item) {
    std::string out;
    for (size_t i = 0; i < item.allowed_values.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + item.allowed_values[i] + "\"";
    }
    return out;
}

std::string value_error(const std::string& value, const ConstraintItem& item) {
    return "value \"" + value + "\" is not an exact member of the allowed list [" +
           allowed_list(item) + "]";
}

// Accepts "rationale" with "message"/"reason" fallbacks; rationale text is
// never load-bearing for the protocol.
std::string read_rationale(const json& body) {
    for (const char* key : {"rationale", "message", "reason"}) {
        if (body.contains(key) && body[key].is_string()) return body[key].get<std::string>();
    }
    return "";
}

}  // namespace

std::optional<std::string> extract_tag(const std::string& raw, std::string_view name) {
    const std::string needle = "[" + std::string(name) + ":";
    const std::string hay = upper(raw);
    size_t pos = hay.find(upper(needle));
    if (pos == std::string::npos) return std::nullopt;
    size_t start = pos + needle.size();
    size_t end = raw.find(']', start);
    if (end == std::string::npos) return std::nullopt;
    return trim(std::string_view(raw).substr(start, end - start));
}

Parsed<P1Proposal> parse_proposal(const std::string& raw, const ConstraintItem& item) {
    std::string err;
    json body = extract_json(raw, err);
    if (!err.empty()) return {std::nullopt, err};
    if (!body.contains("proposals") || !body["proposals"].is_object())
        return {std::nullopt, "missing field \"proposals\""};
    const json& proposals = body["proposals"];
    if (!proposals.contains(item.key) || !proposals[item.key].is_string())
        return {std::nullopt, "proposals lacks an entry for \"" + item.key + "\""};
    std::string value = proposals[item.key].get<std::string>();
    if (!item.allows(value)) return {std::nullopt, value_error(value, item)};
    return {P1Proposal{value, read_rationale(body)}, ""};
}

Parsed<Appraisal> parse_appraisal(const std::string& raw) {
    std::string err;
    json body = extract_json(raw, err);
    if (!err.empty()) return {std::nullopt, err};
    if (!body.contains("appraisal") || !body["appraisal"].is_object())
        return {std::nullopt, "missing field \"appraisal\""};
    const json& a = body["appraisal"];
    if (!a.contains("guessed_opponent_alpha") || !a["guessed_opponent_alpha"].is_number_integer())
        return {std::nullopt, "missing integer field \"guessed_opponent_alpha\""};
    int guessed = a["guessed_opponent_alpha"].get<int>();
    if (guessed < 1 || guessed > 10)
        return {std::nullopt, "guessed_opponent_alpha must be in [1,10], got " +
                                  std::to_string(guessed)};
    if (!a.contains("strategy_intent") || !a["strategy_intent"].is_string())
        return {std::nullopt, "missing string field \"strategy_intent\""};
    std::string intent = trim(a["strategy_intent"].get<std::string>());
    std::transform(intent.begin(), intent.end(), intent.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    Strategy strategy;
    if (intent == "accept") strategy = Strategy::Accept;
    else if (intent == "yield") strategy = Strategy::Yield;
    else if (intent == "compromise") strategy = Strategy::Compromise;
    else if (intent == "push") strategy = Strategy::Push;
    else
        return {std::nullopt,
                "strategy_intent must be one of accept/yield/compromise/push, got \"" + intent +
                    "\""};
    bool room = guessed <= 8;
    if (a.contains("opponent_room_for_compromise") && a["opponent_room_for_compromise"].is_boolean())
        room = a["opponent_room_for_compromise"].get<bool>();
    return {Appraisal{Willingness(guessed), room, strategy}, ""};
}

Parsed<BallotParse> parse_ballot(const std::string& raw, const ConstraintItem& item) {
    std::string err;
    json body = extract_json(raw, err);
    if (!err.empty()) return {std::nullopt, err};
    if (!body.contains("vote") || !body["vote"].is_string())
        return {std::nullopt, "missing string field \"vote\""};
    std::string vote = upper(trim(body["vote"].get<std::string>()));
    if (vote != "AGREE" && vote != "DISAGREE")
        return {std::nullopt, "vote must be AGREE or DISAGREE, got \"" + vote + "\""};
    std::optional<std::string> revised;
    if (body.contains("revised_value") && !body["revised_value"].is_null()) {
        if (!body["revised_value"].is_string())
            return {std::nullopt, "revised_value must be a string or null"};
        std::string value = body["revised_value"].get<std::string>();
        if (!value.empty()) revised = value;
    }
    if (vote == "AGREE") {
        if (revised) return {std::nullopt, "vote AGREE requires revised_value null"};
        return {BallotParse{VoteChoice::Agree, std::nullopt, read_rationale(body)}, ""};
    }
    if (!revised) return {std::nullopt, "vote DISAGREE requires a revised_value"};
    if (!item.allows(*revised)) return {std::nullopt, value_error(*revised, item)};
    return {BallotParse{VoteChoice::Disagree, revised, read_rationale(body)}, ""};
}

Parsed<UpdateParse> parse_update(const std::string& raw, const ConstraintItem& item) {
    std::optional<ProposerMove> action;
    if (auto tag = extract_tag(raw, "ACTION")) {
        std::string a = upper(*tag);
        if (a == "KEEP") action = ProposerMove::Keep;
        else if (a == "UPDATE") action = ProposerMove::Update;
        else if (a == "COMPROMISE") action = ProposerMove::Compromise;
        else
            return {std::nullopt, "[ACTION: ...] must be KEEP, UPDATE or COMPROMISE, got \"" +
                                      *tag + "\""};
    }
    std::optional<std::string> revised = extract_tag(raw, "REVISED_VALUE");
    if (revised && !item.allows(*revised)) return {std::nullopt, value_error(*revised, item)};
    if (!revised && action != ProposerMove::Keep)
        return {std::nullopt, "missing tag [REVISED_VALUE: <exact_string_from_list>]"};
    std::string reason;
    if (auto tag = extract_tag(raw, "PROPOSER_REASON")) reason = *tag;
    return {UpdateParse{action, revised, reason}, ""};
}

Parsed<JudgeParse> parse_judge(const std::string& raw) {
    JudgeParse out;
    for (size_t i = 0; i < kJudgeCriteria.size(); ++i) {
        auto tag = extract_tag(raw, upper(std::string(kJudgeCriteria[i])));
        if (!tag) return {std::nullopt, "missing tag for " + std::string(kJudgeCriteria[i])};
        std::string v = upper(*tag);
        if (v != "A" && v != "B")
            return {std::nullopt,
                    std::string(kJudgeCriteria[i]) + " must be A or B, got \"" + *tag + "\""};
        out.winners[i] = v[0];
    }
    auto overall = extract_tag(raw, "OVERALL_WINNER");
    if (!overall) return {std::nullopt, "missing tag [OVERALL_WINNER: A|B]"};
    std::string v = upper(*overall);
    if (v != "A" && v != "B")
        return {std::nullopt, "overall winner must be A or B, got \"" + *overall + "\""};
    out.overall = v[0];
    return {out, ""};
}

Parsed<ParsedResponse> parse_response(Phase phase, const std::string& raw,
                                      const ConstraintItem& item) {
    switch (phase) {
        case Phase::Propose: {
            auto p = parse_proposal(raw, item);
            if (!p.ok()) return {std::nullopt, p.error};
            return {ParsedResponse{phase, *p.value, raw}, ""};
        }
        case Phase::Appraise: {
            auto p = parse_appraisal(raw);
            if (!p.ok()) return {std::nullopt, p.error};
            return {ParsedResponse{phase, *p.value, raw}, ""};
        }
        case Phase::Vote:
        case Phase::Execute: {
            auto p = parse_ballot(raw, item);
            if (!p.ok()) return {std::nullopt, p.error};
            return {ParsedResponse{phase, *p.value, raw}, ""};
        }
        case Phase::Update: {
            auto p = parse_update(raw, item);
            if (!p.ok()) return {std::nullopt, p.error};
            return {ParsedResponse{phase, *p.value, raw}, ""};
        }
        case Phase::Judge: {
            auto p = parse_judge(raw);
            if (!p.ok()) return {std::nullopt, p.error};
            return {ParsedResponse{phase, *p.value, raw}, ""};
        }
    }
    return {std::nullopt, "unknown phase"};
}

}  // namespace mind::llm
