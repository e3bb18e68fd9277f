#include "explorable/core/segment.hpp"

#include "explorable/core/errors.hpp"

#include <utility>
#include <vector>

namespace explorable {

namespace {

using Span = std::pair<std::size_t, std::size_t>;

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Shrinks [b, e) to exclude surrounding whitespace; returns nullopt when nothing is left.
std::optional<Span> content(const std::string &s, std::size_t b, std::size_t e)
{
    while (b < e && is_ws(s[b]))
        ++b;
    while (e > b && is_ws(s[e - 1]))
        --e;
    if (b == e)
        return std::nullopt;
    return Span{b, e};
}

std::vector<Span> by_marker(const std::string &s, const std::string &marker)
{
    std::vector<Span> out;
    std::size_t start = 0;
    while (true) {
        auto pos = marker.empty() ? std::string::npos : s.find(marker, start);
        auto end = pos == std::string::npos ? s.size() : pos;
        if (auto c = content(s, start, end))
            out.push_back(*c);
        if (pos == std::string::npos)
            break;
        start = pos + marker.size();
    }
    return out;
}

std::vector<Span> by_paragraph(const std::string &s)
{
    std::vector<Span> out;
    std::size_t para_start = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '\n') {
            ++i;
            continue;
        }
        // Look for a blank line following this newline.
        std::size_t j = i + 1;
        while (j < s.size() && (s[j] == ' ' || s[j] == '\t' || s[j] == '\r'))
            ++j;
        if (j < s.size() && s[j] == '\n') {
            if (auto c = content(s, para_start, i))
                out.push_back(*c);
            para_start = j;
            i = j;
            continue;
        }
        ++i;
    }
    if (auto c = content(s, para_start, s.size()))
        out.push_back(*c);
    return out;
}

std::vector<Span> by_sentence(const std::string &s, Span para)
{
    std::vector<Span> out;
    bool in_math = false;
    std::size_t start = para.first;
    for (std::size_t i = para.first; i < para.second; ++i) {
        char c = s[i];
        if (c == '$' && (i == 0 || s[i - 1] != '\\'))
            in_math = !in_math;
        if (in_math || (c != '.' && c != '!' && c != '?'))
            continue;
        if (i + 1 < para.second && is_ws(s[i + 1])) {
            if (auto sp = content(s, start, i + 1))
                out.push_back(*sp);
            start = i + 1;
        }
    }
    if (auto sp = content(s, start, para.second))
        out.push_back(*sp);
    return out;
}

} // namespace

WrittenProof segment_written_proof(const std::string &theorem_text, const std::string &proof_text,
                                   const std::optional<std::string> &marker)
{
    std::vector<Span> spans;
    if (marker && !marker->empty()) {
        spans = by_marker(proof_text, *marker);
    }
    else {
        spans = by_paragraph(proof_text);
        if (spans.size() == 1)
            spans = by_sentence(proof_text, spans.front());
    }
    if (spans.empty())
        throw EmptyProof("proof text contains no sentences");

    WrittenProof w;
    w.theorem_text = theorem_text;
    w.leading = proof_text.substr(0, spans.front().first);
    for (std::size_t k = 0; k < spans.size(); ++k) {
        ProseStep step;
        step.index = static_cast<int>(k) + 1;
        step.text = proof_text.substr(spans[k].first, spans[k].second - spans[k].first);
        auto next = k + 1 < spans.size() ? spans[k + 1].first : proof_text.size();
        step.trailing = proof_text.substr(spans[k].second, next - spans[k].second);
        w.steps.push_back(std::move(step));
    }
    return w;
}

} // namespace explorable
