#include "explorable/service/corpus.hpp"

#include "explorable/core/bundle.hpp"
#include "explorable/core/errors.hpp"
#include "explorable/core/segment.hpp"
#include "explorable/core/validate.hpp"

#include <json.hpp>

#include <algorithm>

namespace fs = std::filesystem;
using nlohmann::json;

namespace explorable {

std::vector<std::string> list_corpus(const fs::path &corpus)
{
    if (!fs::is_directory(corpus))
        throw NotFound("corpus directory " + corpus.string() + " does not exist");
    std::vector<std::string> ids;
    for (const auto &e : fs::directory_iterator(corpus))
        if (e.is_directory() && fs::exists(e.path() / "document.json"))
            ids.push_back(e.path().filename().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

CorpusEntry load_corpus_entry(const fs::path &corpus, const std::string &id)
{
    auto dir = corpus / id;
    if (id.empty() || id.find('/') != std::string::npos || !fs::exists(dir / "document.json"))
        throw NotFound("no document '" + id + "' in corpus " + corpus.string());
    json j = json::parse(read_file(dir / "document.json"), nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ConfigError(id + "/document.json is not a JSON object");

    CorpusEntry e;
    e.id = j.value("id", id);
    e.title = j.value("title", "");
    e.dir = dir;
    try {
        std::optional<std::string> marker;
        if (j.contains("step_marker"))
            marker = j.at("step_marker").get<std::string>();
        e.written = segment_written_proof(j.at("theorem").get<std::string>(), j.at("proof").get<std::string>(), marker);
        for (const auto &in : j.value("inputs", json::array())) {
            InputVar v;
            v.name = in.at("name").get<std::string>();
            auto domain = in.value("domain", "integer");
            if (domain != "integer" && domain != "natural")
                throw ConfigError(id + ": input " + v.name + " has unknown domain " + domain);
            v.domain = domain == "natural" ? NumberDomain::natural : NumberDomain::integer;
            if (in.contains("range"))
                v.default_range = {in["range"].at(0).get<std::int64_t>(), in["range"].at(1).get<std::int64_t>()};
            v.default_value = in.value("default", v.default_range.lo);
            e.written.inputs.push_back(v);
        }
        if (j.contains("oracle"))
            e.written.oracle = OraclePredicates{j["oracle"].at("hypothesis").get<std::string>(),
                                                j["oracle"].at("conclusion").get<std::string>()};
        for (const auto &p : j.value("propositions", json::array())) {
            int step = p.at("step").get<int>();
            auto name = p.at("name").get<std::string>();
            auto text = p.at("text").get<std::string>();
            auto it = std::find_if(e.written.steps.begin(), e.written.steps.end(),
                                   [&](const ProseStep &s) { return s.index == step; });
            if (it == e.written.steps.end())
                throw ConfigError(id + ": proposition " + name + " names missing step " + std::to_string(step));
            auto at = it->text.find(text);
            if (at == std::string::npos)
                throw ConfigError(id + ": step " + std::to_string(step) + " does not contain '" + text + "'");
            it->propositions.push_back({name, at, at + text.size()});
        }
        if (j.contains("lean"))
            e.imported_lean = read_file(dir / j["lean"].get<std::string>());
        if (j.contains("gold"))
            e.gold = GoldGraph::from_json_text(read_file(dir / j["gold"].get<std::string>()));
    } catch (const json::exception &ex) {
        throw ConfigError(id + "/document.json: " + ex.what());
    }
    auto report = validate_written(e.written);
    if (!report.ok())
        throw ConfigError(id + ": " + report.violations.front().path + ": " + report.violations.front().message);
    return e;
}

} // namespace explorable
