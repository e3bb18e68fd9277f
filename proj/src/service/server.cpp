#include "explorable/service/server.hpp"

#include "explorable/core/bundle.hpp"
#include "explorable/core/errors.hpp"
#include "explorable/depgraph/depgraph.hpp"
#include "explorable/prober/oracle.hpp"
#include "explorable/prober/prober.hpp"
#include "explorable/service/pipeline.hpp"

#include <httplib.h>

#include <regex>

namespace fs = std::filesystem;
using nlohmann::json;

namespace explorable {

namespace {

HttpReply error_reply(int status, const std::string &message)
{
    return {status, json{{"error", message}}};
}

std::optional<std::string> param(const std::multimap<std::string, std::string> &q, const std::string &name)
{
    auto it = q.find(name);
    if (it == q.end())
        return std::nullopt;
    return it->second;
}

std::int64_t parse_int(const std::string &name, const std::string &value)
{
    static const std::regex re(R"(^-?\d{1,18}$)");
    if (!std::regex_match(value, re))
        throw InvalidBinding(name + "=" + value + " is not an integer");
    return std::stoll(value);
}

int status_for(const Error &e)
{
    switch (e.error_class()) {
    case ErrorClass::not_found:
        return 404;
    case ErrorClass::toolchain:
        return 503;
    case ErrorClass::input:
    case ErrorClass::config:
        return 422;
    case ErrorClass::finding:
        break;
    }
    return 500;
}

} // namespace

std::map<std::string, ProofDocument> load_bundles(const fs::path &dir)
{
    std::map<std::string, ProofDocument> docs;
    if (!fs::is_directory(dir))
        return docs;
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto &f : files) {
        auto loaded = load_bundle(f);
        docs[loaded.doc.id] = std::move(loaded.doc);
    }
    return docs;
}

Service::Service(std::map<std::string, ProofDocument> docs, LeanRunner &runner, fs::path workdir, ServerConfig config)
    : docs_(std::move(docs)), runner_(runner), workdir_(std::move(workdir)), config_(std::move(config))
{
    for (const auto &[id, doc] : docs_)
        caches_[id] = doc.sweep_cache.value_or(SweepCache{});
}

Service::~Service()
{
    stop();
    // Detached eval jobs hold references to this object.
    std::vector<std::shared_future<EvalResult>> jobs;
    {
        std::lock_guard lock(mu_);
        for (auto &[_, f] : pending_)
            jobs.push_back(f);
    }
    for (auto &f : jobs)
        f.wait();
}

HttpReply Service::handle(const std::string &path, const std::multimap<std::string, std::string> &query)
{
    static const std::regex doc_re(R"(^/documents/([^/]+)(/(sweep|eval|deps))?/?$)");
    try {
        if (path == "/documents" || path == "/documents/")
            return documents();
        std::smatch m;
        if (!std::regex_match(path, m, doc_re))
            return error_reply(404, "no route " + path);
        auto it = docs_.find(m[1].str());
        if (it == docs_.end())
            return error_reply(404, "unknown document " + m[1].str());
        auto what = m[3].str();
        if (what.empty())
            return document(it->second);
        if (what == "sweep")
            return sweep(it->second, query);
        if (what == "eval")
            return eval(it->second, query);
        return deps(it->second, query);
    } catch (const Error &e) {
        return error_reply(status_for(e), e.what());
    } catch (const std::exception &e) {
        return error_reply(500, e.what());
    }
}

HttpReply Service::documents() const
{
    json list = json::array();
    for (const auto &[id, doc] : docs_)
        list.push_back({{"id", id}, {"theorem", doc.written.theorem_text}, {"steps", doc.written.steps.size()}});
    return {200, json{{"documents", list}}};
}

HttpReply Service::document(const ProofDocument &doc) const
{
    return {200, to_json(doc)};
}

HttpReply Service::sweep(const ProofDocument &doc, const std::multimap<std::string, std::string> &query)
{
    auto var = param(query, "var");
    if (!var) {
        if (doc.written.inputs.size() != 1)
            throw InvalidBinding("var is required");
        var = doc.written.inputs.front().name;
    }
    const InputVar *in = doc.written.find_input(*var);
    if (!in)
        throw InvalidBinding("document " + doc.id + " has no input " + *var);
    IntRange range = in->default_range;
    if (auto lo = param(query, "lo"))
        range.lo = parse_int("lo", *lo);
    if (auto hi = param(query, "hi"))
        range.hi = parse_int("hi", *hi);
    if (range.size() > config_.sweep_cap)
        throw RangeTooLarge(std::to_string(range.size()) + " values requested, the cap is " + std::to_string(config_.sweep_cap));
    if (!doc.written.oracle)
        throw MissingOracle("document " + doc.id + " registers no oracle predicates");

    std::lock_guard lock(mu_);
    auto &cache = caches_[doc.id];
    if (auto it = cache.sweeps.find(*var); it != cache.sweeps.end() && it->second.range == range)
        return {200, to_json(it->second)};
    // Colors come from the oracle; break steps only from evaluations already made.
    Sweep s;
    s.variable = *var;
    s.range = range;
    Binding base = default_binding(doc.written);
    for (std::int64_t v = range.lo; !range.empty() && v <= range.hi; ++v) {
        Binding b = base;
        b.assignments[*var] = v;
        check_binding(doc.written, b);
        SweepEntry e;
        e.value = v;
        if (auto hit = cache.evals.find(b.key()); hit != cache.evals.end()) {
            e.hypotheses_ok = hit->second.hypotheses_ok;
            e.conclusion_holds = hit->second.conclusion_holds.value_or(false);
            e.break_step = hit->second.break_step;
        } else {
            std::tie(e.hypotheses_ok, e.conclusion_holds) = oracle_eval(doc, b);
        }
        s.entries.push_back(e);
    }
    return {200, to_json(s)};
}

HttpReply Service::eval(const ProofDocument &doc, const std::multimap<std::string, std::string> &query)
{
    Binding b;
    for (const auto &[k, v] : query)
        b.assignments[k] = parse_int(k, v);
    check_binding(doc.written, b);
    auto key = b.key();

    auto reply = [&](const EvalResult &e, bool cached, bool pending) {
        auto rendered = render_eval(doc, e);
        json body = to_json(e);
        json steps = json::array();
        for (const auto &s : doc.written.steps) {
            json step{{"index", s.index}};
            if (auto t = rendered.step_text.find(s.index); t != rendered.step_text.end())
                step["text"] = t->second;
            if (auto er = rendered.render_errors.find(s.index); er != rendered.render_errors.end())
                step["error"] = er->second;
            step["breaks"] = e.break_step && *e.break_step == s.index;
            steps.push_back(step);
        }
        body["steps"] = steps;
        body["cached"] = cached;
        body["probes_pending"] = pending;
        return HttpReply{200, body};
    };

    std::shared_future<EvalResult> job;
    {
        std::lock_guard lock(mu_);
        auto &cache = caches_[doc.id];
        if (auto hit = cache.evals.find(key); hit != cache.evals.end())
            return reply(hit->second, true, false);
        auto pkey = doc.id + "/" + key;
        if (auto p = pending_.find(pkey); p != pending_.end()) {
            job = p->second;
        } else {
            if (!doc.written.oracle)
                throw MissingOracle("document " + doc.id + " registers no oracle predicates");
            if (in_flight_.load() >= config_.max_uncached_evals)
                return error_reply(503, "too many uncached evaluations in progress; retry later");
            ++in_flight_;
            const ProofDocument *d = &doc;
            job = std::async(std::launch::async, [this, d, b, pkey]() -> EvalResult {
                      struct Done {
                          std::atomic<std::size_t> &count;
                          ~Done() { --count; }
                      } done{in_flight_};
                      ProbeContext ctx{runner_, workdir_};
                      auto r = evaluate_at(*d, b, ctx);
                      std::lock_guard lock(mu_);
                      caches_[d->id].evals[b.key()] = r;
                      return r;
                  }).share();
            pending_[pkey] = job;
        }
    }

    if (job.wait_for(config_.eval_deadline) != std::future_status::ready) {
        EvalResult partial;
        partial.binding = b;
        auto [hyp, concl] = oracle_eval(doc, b);
        partial.hypotheses_ok = hyp;
        partial.conclusion_holds = concl;
        return reply(partial, false, true);
    }
    EvalResult result;
    try {
        result = job.get();
    } catch (...) {
        std::lock_guard lock(mu_);
        pending_.erase(doc.id + "/" + key);
        throw;
    }
    {
        std::lock_guard lock(mu_);
        pending_.erase(doc.id + "/" + key);
    }
    return reply(result, false, false);
}

HttpReply Service::deps(const ProofDocument &doc, const std::multimap<std::string, std::string> &query) const
{
    auto fact = param(query, "fact");
    if (!fact)
        throw InvalidBinding("fact is required");
    if (!doc.graph)
        throw NotFound("document " + doc.id + " has no dependency graph");
    std::string name = *fact;
    if (!doc.graph->nodes.count(name)) {
        for (const auto &[key, target] : doc.links.var_links)
            if (key.second == name && doc.graph->nodes.count(target)) {
                name = target;
                break;
            }
    }
    auto node = doc.graph->nodes.find(name);
    if (node == doc.graph->nodes.end())
        throw NotFound("no fact named " + *fact);
    json body{{"fact", name}};
    const auto &maps = doc.graph->step_maps;
    json upstream = json::array();
    json used_by = json::array();
    if (node->second.prose_step_index) {
        int k = *node->second.prose_step_index;
        body["step"] = k;
        if (auto it = maps.relies_on.find(k); it != maps.relies_on.end())
            for (const auto &l : it->second)
                upstream.push_back(l.step);
        if (auto it = maps.used_by.find(k); it != maps.used_by.end())
            for (int s : it->second)
                used_by.push_back(s);
    } else {
        body["step"] = nullptr;
    }
    body["upstream"] = upstream;
    body["used_by"] = used_by;
    body["downstream"] = downstream_steps(*doc.graph, name);
    return {200, body};
}

bool Service::listen()
{
    http_ = std::make_unique<httplib::Server>();
    auto cors = config_.cors_origin;
    http_->set_default_headers({{"Access-Control-Allow-Origin", cors}});
    http_->Options(R"(.*)", [](const httplib::Request &, httplib::Response &res) {
        res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    http_->Get(R"(.*)", [this](const httplib::Request &req, httplib::Response &res) {
        std::multimap<std::string, std::string> q(req.params.begin(), req.params.end());
        auto reply = handle(req.path, q);
        res.status = reply.status;
        res.set_content(reply.body.dump(), "application/json; charset=utf-8");
    });
    int port = config_.port;
    if (port == 0) {
        port = http_->bind_to_any_port(config_.host);
    } else if (!http_->bind_to_port(config_.host, port)) {
        return false;
    }
    bound_port_ = port;
    return http_->listen_after_bind();
}

void Service::stop()
{
    if (http_)
        http_->stop();
}

} // namespace explorable
