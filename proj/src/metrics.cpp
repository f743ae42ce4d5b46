#include "mind/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace mind {

using nlohmann::json;

namespace {

void require_cases(const std::vector<ItemOutcome>& outcomes, const char* op) {
    if (outcomes.empty())
        throw DomainError("empty-batch", std::string(op) + " needs at least one case");
}

bool top_agent_matched(const ItemOutcome& o) {
    std::set<std::string> top(o.top_agents.begin(), o.top_agents.end());
    return std::any_of(o.agents.begin(), o.agents.end(), [&](const AgentOutcome& a) {
        return a.matched && top.count(a.id) > 0;
    });
}

}  // namespace

double total_fidelity(const std::vector<ItemOutcome>& outcomes) {
    require_cases(outcomes, "total_fidelity");
    double sum = 0.0;
    for (const ItemOutcome& o : outcomes) {
        if (o.agents.empty()) throw DomainError("empty-case", o.item_key);
        double matched = 0.0;
        for (const AgentOutcome& a : o.agents)
            if (a.matched) matched += 1.0;
        sum += matched / static_cast<double>(o.agents.size());
    }
    return sum / static_cast<double>(outcomes.size());
}

std::optional<double> debate_hit_rate(const std::vector<ItemOutcome>& outcomes) {
    require_cases(outcomes, "debate_hit_rate");
    std::size_t debates = 0, hits = 0;
    for (const ItemOutcome& o : outcomes) {
        if (o.resolution.fallback) continue;
        ++debates;
        if (top_agent_matched(o)) ++hits;
    }
    if (debates == 0) return std::nullopt;
    return static_cast<double>(hits) / static_cast<double>(debates);
}

double debate_ratio(const std::vector<ItemOutcome>& outcomes) {
    require_cases(outcomes, "debate_ratio");
    std::size_t debates = 0;
    for (const ItemOutcome& o : outcomes)
        if (!o.resolution.fallback) ++debates;
    return static_cast<double>(debates) / static_cast<double>(outcomes.size());
}

double high_w_hit(const std::vector<ItemOutcome>& outcomes) {
    require_cases(outcomes, "high_w_hit");
    std::size_t hits = 0;
    for (const ItemOutcome& o : outcomes)
        if (top_agent_matched(o)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

Satisfaction total_satisfaction(const std::vector<ItemOutcome>& outcomes) {
    require_cases(outcomes, "total_satisfaction");
    Satisfaction s;
    for (const ItemOutcome& o : outcomes)
        for (const AgentOutcome& a : o.agents)
            if (a.matched) s.raw += static_cast<double>(a.w);
    s.per_case = s.raw / static_cast<double>(outcomes.size());
    return s;
}

std::optional<double> jain_fairness(const std::vector<double>& scores) {
    if (scores.empty()) throw DomainError("empty-group", "Jain's index needs at least one score");
    double sum = 0.0, sum_sq = 0.0;
    for (double s : scores) {
        if (s < 0.0) throw DomainError("negative-score", "satisfaction scores are non-negative");
        sum += s;
        sum_sq += s * s;
    }
    if (sum_sq == 0.0) return std::nullopt;  // nobody got anything: fairness undefined
    return (sum * sum) / (static_cast<double>(scores.size()) * sum_sq);
}

std::optional<double> jain_mean(const std::vector<ItemOutcome>& outcomes) {
    require_cases(outcomes, "jain_mean");
    // Group by scenario; per-agent satisfaction within the group.
    std::map<std::string, std::map<std::string, double>> groups;
    for (const ItemOutcome& o : outcomes) {
        auto& agents = groups[o.scenario_id];
        for (const AgentOutcome& a : o.agents) {
            agents.emplace(a.id, 0.0);
            if (a.matched) agents[a.id] += static_cast<double>(a.w);
        }
    }
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& [scenario_id, agents] : groups) {
        std::vector<double> scores;
        scores.reserve(agents.size());
        for (const auto& [id, score] : agents) scores.push_back(score);
        if (auto j = jain_fairness(scores)) {
            sum += *j;
            ++counted;
        }
    }
    if (counted == 0) return std::nullopt;
    return sum / static_cast<double>(counted);
}

TomStats tom_metrics(const std::vector<TomPair>& pairs) {
    TomStats t;
    t.n = pairs.size();
    if (pairs.empty()) return t;

    double abs_sum = 0.0;
    std::size_t within1 = 0, within2 = 0;
    for (const TomPair& p : pairs) {
        const int diff = std::abs(p.w_true - p.w_pred);
        abs_sum += diff;
        if (diff <= 1) ++within1;
        if (diff <= 2) ++within2;
    }
    t.mae = abs_sum / static_cast<double>(t.n);
    t.acc1 = static_cast<double>(within1) / static_cast<double>(t.n);
    t.acc2 = static_cast<double>(within2) / static_cast<double>(t.n);

    if (t.n >= 2) {
        double mean_t = 0.0, mean_p = 0.0;
        for (const TomPair& p : pairs) {
            mean_t += p.w_true;
            mean_p += p.w_pred;
        }
        mean_t /= static_cast<double>(t.n);
        mean_p /= static_cast<double>(t.n);
        double cov = 0.0, var_t = 0.0, var_p = 0.0;
        for (const TomPair& p : pairs) {
            const double dt = p.w_true - mean_t;
            const double dp = p.w_pred - mean_p;
            cov += dt * dp;
            var_t += dt * dt;
            var_p += dp * dp;
        }
        if (var_t > 0.0 && var_p > 0.0) t.pearson = cov / std::sqrt(var_t * var_p);
    }
    return t;
}

std::vector<TomPair> harvest_tom_pairs(const std::vector<TranscriptEvent>& events,
                                       const std::vector<ItemOutcome>& outcomes) {
    // Index proposer weights by (scenario, item).
    std::map<std::pair<std::string, std::string>, int> proposer_w;
    for (const ItemOutcome& o : outcomes) {
        if (o.proposer.empty()) continue;
        for (const AgentOutcome& a : o.agents)
            if (a.id == o.proposer) proposer_w[{o.scenario_id, o.item_key}] = a.w;
    }
    std::vector<TomPair> pairs;
    for (const TranscriptEvent& e : events) {
        if (e.kind != EventKind::Appraisal) continue;
        auto it = proposer_w.find({e.scenario_id, e.item_key});
        if (it == proposer_w.end()) continue;
        pairs.push_back({it->second, e.payload.at("guessed_w").get<int>()});
    }
    return pairs;
}

MetricsReport compute_report(const std::vector<ItemOutcome>& outcomes,
                             const std::vector<TranscriptEvent>& events) {
    require_cases(outcomes, "compute_report");
    MetricsReport r;
    r.cases = outcomes.size();
    for (const ItemOutcome& o : outcomes)
        if (!o.resolution.fallback) ++r.debate_cases;
    r.total_fidelity = total_fidelity(outcomes);
    r.debate_hit_rate = debate_hit_rate(outcomes);
    r.debate_ratio = debate_ratio(outcomes);
    r.high_w_hit = high_w_hit(outcomes);
    const Satisfaction s = total_satisfaction(outcomes);
    r.s_total_raw = s.raw;
    r.s_total_per_case = s.per_case;
    r.jain_mean = jain_mean(outcomes);

    std::vector<TomPair> pairs = harvest_tom_pairs(events, outcomes);
    if (!pairs.empty()) r.tom = tom_metrics(pairs);

    std::set<std::string> ids;
    std::map<int, std::vector<const ItemOutcome*>> by_size;
    for (const ItemOutcome& o : outcomes) {
        ids.insert(o.scenario_id);
        by_size[static_cast<int>(o.agents.size())].push_back(&o);
    }
    r.scenario_ids.assign(ids.begin(), ids.end());
    for (const auto& [size, slice] : by_size) {
        SizeSlice ss;
        ss.cases = slice.size();
        for (const ItemOutcome* o : slice)
            if (!o->resolution.fallback) ++ss.debate_cases;
        ss.debate_ratio = static_cast<double>(ss.debate_cases) / static_cast<double>(ss.cases);
        r.by_group_size[size] = ss;
    }
    return r;
}

namespace {

json opt_to_json(const std::optional<double>& v) { return v ? json(*v) : json(); }

std::optional<double> opt_from_json(const json& j, const char* field) {
    if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
    return j.at(field).get<double>();
}

}  // namespace

json report_to_json(const MetricsReport& r) {
    json by_size = json::object();
    for (const auto& [size, slice] : r.by_group_size)
        by_size[std::to_string(size)] = {{"cases", slice.cases},
                                         {"debate_cases", slice.debate_cases},
                                         {"debate_ratio", slice.debate_ratio}};
    json tom;
    if (r.tom) {
        tom = {{"n", r.tom->n},
               {"mae", r.tom->mae},
               {"acc1", r.tom->acc1},
               {"acc2", r.tom->acc2},
               {"pearson", opt_to_json(r.tom->pearson)}};
    }
    return {{"schema", kReportSchema},
            {"cases", r.cases},
            {"debate_cases", r.debate_cases},
            {"total_fidelity", r.total_fidelity},
            {"debate_hit_rate", opt_to_json(r.debate_hit_rate)},
            {"debate_ratio", r.debate_ratio},
            {"high_w_hit", r.high_w_hit},
            {"s_total_raw", r.s_total_raw},
            {"s_total_per_case", r.s_total_per_case},
            {"jain_mean", opt_to_json(r.jain_mean)},
            {"tom", tom},
            {"scenario_ids", r.scenario_ids},
            {"by_group_size", by_size}};
}

MetricsReport report_from_json(const json& j) {
    if (j.value("schema", "") != kReportSchema)
        throw ParseError("schema-mismatch", "expected " + std::string(kReportSchema));
    MetricsReport r;
    r.cases = j.at("cases").get<std::size_t>();
    r.debate_cases = j.at("debate_cases").get<std::size_t>();
    r.total_fidelity = j.at("total_fidelity").get<double>();
    r.debate_hit_rate = opt_from_json(j, "debate_hit_rate");
    r.debate_ratio = j.at("debate_ratio").get<double>();
    r.high_w_hit = j.at("high_w_hit").get<double>();
    r.s_total_raw = j.at("s_total_raw").get<double>();
    r.s_total_per_case = j.at("s_total_per_case").get<double>();
    r.jain_mean = opt_from_json(j, "jain_mean");
    if (j.contains("tom") && !j.at("tom").is_null()) {
        TomStats t;
        const json& tj = j.at("tom");
        t.n = tj.at("n").get<std::size_t>();
        t.mae = tj.at("mae").get<double>();
        t.acc1 = tj.at("acc1").get<double>();
        t.acc2 = tj.at("acc2").get<double>();
        t.pearson = opt_from_json(tj, "pearson");
        r.tom = t;
    }
    r.scenario_ids = j.at("scenario_ids").get<std::vector<std::string>>();
    if (j.contains("by_group_size")) {
        for (const auto& [key, sj] : j.at("by_group_size").items()) {
            SizeSlice ss;
            ss.cases = sj.at("cases").get<std::size_t>();
            ss.debate_cases = sj.at("debate_cases").get<std::size_t>();
            ss.debate_ratio = sj.at("debate_ratio").get<double>();
            r.by_group_size[std::stoi(key)] = ss;
        }
    }
    return r;
}

void write_report(const std::string& path, const MetricsReport& r) {
    std::ofstream out(path);
    if (!out) throw ParseError("io-error", "cannot write " + path);
    out << report_to_json(r).dump(2) << "\n";
}

MetricsReport read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("io-error", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("bad-json", path + ": " + e.what());
    }
    return report_from_json(j);
}

}  // namespace mind
