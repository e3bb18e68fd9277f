#include "explorable/templater/templater.hpp"

#include "explorable/core/errors.hpp"
#include "explorable/core/text.hpp"
#include "explorable/formalizer/formalizer.hpp"

namespace explorable {

namespace {

struct Piece {
    bool key = false;
    std::string text;
};

std::vector<Piece> split(const std::string &s, std::vector<std::string> *problems)
{
    std::vector<Piece> out;
    std::string lit;
    std::size_t i = 0;
    int escaped_open = 0; // `\{{` also makes its closing `}}` literal
    while (i < s.size()) {
        if (s.compare(i, 3, "\\{{") == 0) {
            lit += "{{";
            i += 3;
            ++escaped_open;
            continue;
        }
        if (s.compare(i, 2, "{{") == 0) {
            auto close = s.find("}}", i + 2);
            auto next_open = s.find("{{", i + 2);
            if (close == std::string::npos || (next_open != std::string::npos && next_open < close)) {
                if (problems)
                    problems->push_back("unbalanced '{{' at offset " + std::to_string(i));
                lit += "{{";
                i += 2;
                continue;
            }
            std::string key = text::trim_copy(s.substr(i + 2, close - i - 2));
            if (!text::is_valid_identifier(key) && problems)
                problems->push_back("malformed key '" + key + "' at offset " + std::to_string(i));
            if (!lit.empty())
                out.push_back({false, std::move(lit)});
            lit.clear();
            out.push_back({true, key});
            i = close + 2;
            continue;
        }
        if (s.compare(i, 2, "}}") == 0) {
            if (escaped_open > 0) {
                --escaped_open;
                lit += "}}";
                i += 2;
                continue;
            }
            if (problems)
                problems->push_back("unbalanced '}}' at offset " + std::to_string(i));
        }
        lit += s[i++];
    }
    if (!lit.empty())
        out.push_back({false, std::move(lit)});
    return out;
}

std::string strip_response(const std::string &response)
{
    std::string body = response;
    if (body.find("```") != std::string::npos)
        body = extract_lean_code(body);
    return text::trim_copy(body);
}

} // namespace

TemplateParse parse_template(const std::string &text)
{
    TemplateParse p;
    for (const auto &piece : split(text, &p.problems))
        if (piece.key)
            p.keys.insert(piece.text);
    return p;
}

WorkedTemplate make_template(int prose_step_index, std::string text)
{
    WorkedTemplate t;
    t.prose_step_index = prose_step_index;
    t.keys = parse_template(text).keys;
    t.template_text = std::move(text);
    return t;
}

ValidationReport validate_template(const WorkedTemplate &t, const std::set<std::string> &available_keys)
{
    ValidationReport r;
    std::string path = "$.templates." + std::to_string(t.prose_step_index);
    if (text::trim(t.template_text).empty())
        r.violation(path + ".template_text", "empty template");
    auto parsed = parse_template(t.template_text);
    for (const auto &p : parsed.problems)
        r.violation(path + ".template_text", p);
    if (parsed.keys != t.keys)
        r.violation(path + ".keys", "keys differ from the placeholders in the text");
    for (const auto &k : parsed.keys)
        if (!available_keys.count(k))
            r.violation(path + ".template_text", "unknown key '" + k + "'");
    return r;
}

std::string instantiate(const WorkedTemplate &t, const std::map<std::string, ReducedValue> &values)
{
    auto pieces = split(t.template_text, nullptr);
    std::vector<std::string> missing;
    std::string out;
    for (const auto &p : pieces) {
        if (!p.key) {
            out += p.text;
            continue;
        }
        auto it = values.find(p.text);
        if (it == values.end()) {
            if (std::find(missing.begin(), missing.end(), p.text) == missing.end())
                missing.push_back(p.text);
            continue;
        }
        out += render_value(it->second);
    }
    if (!missing.empty())
        throw MissingKey("step " + std::to_string(t.prose_step_index) + " has no value for " + text::join(missing, ", "));
    return out;
}

WorkedTemplate generate_template(const ProseStep &step, const std::set<std::string> &available_keys,
                                 GenerationProvider &provider, int max_attempts, const std::string &doc_id)
{
    if (max_attempts < 1)
        throw ConfigError("max_attempts must be at least 1");
    std::string keys = text::join(std::vector<std::string>(available_keys.begin(), available_keys.end()), ", ");
    std::string feedback;
    std::string last;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        CompletionRequest req;
        req.purpose = "template";
        req.metadata = {{"doc", doc_id}, {"step", std::to_string(step.index)}, {"attempt", std::to_string(attempt)}};
        req.messages.push_back({"system", load_prompt("template")});
        req.messages.push_back({"user", fill_prompt(load_prompt("template_user"), {{"index", std::to_string(step.index)},
                                                                                   {"text", step.text},
                                                                                   {"keys", keys.empty() ? "(none)" : keys},
                                                                                   {"feedback", feedback}})});
        auto t = make_template(step.index, strip_response(provider.complete(req)));
        auto report = validate_template(t, available_keys);
        if (report.ok())
            return t;
        last.clear();
        for (const auto &v : report.violations)
            last += (last.empty() ? "" : "; ") + v.message;
        feedback = "The previous template was rejected: " + last + ". Previous template:\n" + t.template_text + "\n";
    }
    throw ExhaustedAttempts(max_attempts, "template for step " + std::to_string(step.index) + ": " + last);
}

std::set<std::string> template_keys(const ProofDocument &doc, int step_index)
{
    std::set<std::string> keys;
    for (const auto &in : doc.written.inputs)
        keys.insert(in.name);
    for (const auto &[key, target] : doc.links.var_links)
        if (key.first <= step_index)
            keys.insert(target);
    return keys;
}

} // namespace explorable
