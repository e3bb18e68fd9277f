#include "explorable/core/errors.hpp"
#include "explorable/core/text.hpp"
#include "explorable/runner/runner.hpp"

#include <json.hpp>

#include <regex>
#include <set>

namespace explorable {

namespace {

std::string normalize_severity(const std::string &s)
{
    return s == "information" ? "info" : s;
}

std::vector<std::string> split_names(std::string_view s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == ',' || c == '\t') {
            if (!cur.empty())
                out.push_back(std::move(cur));
            cur.clear();
        }
        else {
            cur += c;
        }
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

bool turnstile(std::string_view line, std::size_t &len)
{
    if (text::starts_with(line, "⊢")) {
        len = std::string_view("⊢").size();
        return true;
    }
    if (text::starts_with(line, "|-")) {
        len = 2;
        return true;
    }
    return false;
}

} // namespace

std::vector<DiagnosticMessage> parse_diagnostics(std::string_view output)
{
    static const std::regex header(R"(^(.+?):(\d+):(\d+): (error|warning|info|information)(?:\([^)]*\))?: ?(.*)$)");
    std::vector<DiagnosticMessage> out;
    bool open = false;
    for (const auto &line : text::split_lines(output)) {
        if (text::starts_with(line, "{")) {
            auto j = nlohmann::json::parse(line, nullptr, false);
            if (!j.is_discarded() && j.is_object() && j.contains("severity") && j.contains("pos")) {
                out.push_back({normalize_severity(j.value("severity", "")), j["pos"].value("line", 0),
                               j["pos"].value("column", 0), j.value("data", "")});
                open = false;
                continue;
            }
        }
        std::smatch m;
        if (std::regex_match(line, m, header)) {
            out.push_back({normalize_severity(m[4]), std::stoi(m[2]), std::stoi(m[3]), m[5]});
            open = true;
        }
        else if (open) {
            out.back().message += "\n" + line;
        }
    }
    for (auto &d : out)
        while (!d.message.empty() && (d.message.back() == '\n' || d.message.back() == ' '))
            d.message.pop_back();
    return out;
}

ProofState parse_goal_text(std::string_view raw)
{
    ProofState state;
    auto trimmed = text::trim(raw);
    if (trimmed == "no goals" || trimmed.empty())
        return state;

    std::vector<std::string> entries;
    std::optional<std::string> goal;
    for (const auto &line : text::split_lines(raw)) {
        std::size_t tlen = 0;
        if (goal) {
            if (text::trim(line).empty())
                break; // a further goal follows
            *goal += "\n" + line;
            continue;
        }
        if (turnstile(line, tlen)) {
            goal = std::string(text::trim(std::string_view(line).substr(tlen)));
            continue;
        }
        if (text::trim(line).empty() || text::starts_with(line, "case "))
            continue;
        bool continuation = line[0] == ' ' || line[0] == '\t' || line.find(" : ") == std::string::npos;
        if (continuation && !entries.empty())
            entries.back() += " " + std::string(text::trim(line));
        else
            entries.push_back(line);
    }
    if (!goal)
        throw NoTurnstile("goal display has no turnstile line");
    while (!goal->empty() && (goal->back() == '\n' || goal->back() == ' '))
        goal->pop_back();
    state.goal_text = *goal;

    std::set<std::string> seen;
    for (const auto &e : entries) {
        auto colon = e.find(" : ");
        if (colon == std::string::npos)
            throw NoTurnstile("malformed hypothesis line '" + e + "'");
        auto type = text::normalize_space(std::string_view(e).substr(colon + 3));
        for (auto &name : split_names(std::string_view(e).substr(0, colon))) {
            if (!seen.insert(name).second)
                throw DuplicateHypothesisName(name);
            state.hypotheses.push_back({name, type});
        }
    }
    return state;
}

std::string render_goal(const ProofState &state)
{
    if (state.terminal())
        return "no goals";
    std::string out;
    const auto &h = state.hypotheses;
    for (std::size_t i = 0; i < h.size();) {
        std::string names = h[i].name;
        std::size_t j = i + 1;
        while (j < h.size() && h[j].type_text == h[i].type_text)
            names += " " + h[j++].name;
        out += names + " : " + h[i].type_text + "\n";
        i = j;
    }
    return out + "⊢ " + state.goal_text;
}

std::vector<DiagnosticMessage> CompileReport::errors() const
{
    std::vector<DiagnosticMessage> out;
    for (const auto &d : diagnostics)
        if (d.severity == "error")
            out.push_back(d);
    return out;
}

std::string CompileReport::summary() const
{
    std::string out;
    for (const auto &d : diagnostics)
        out += std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + d.severity + ": " + d.message + "\n";
    return out;
}

} // namespace explorable
