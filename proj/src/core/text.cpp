#include "explorable/core/text.hpp"

#include <algorithm>
#include <sstream>

namespace explorable::text {

std::string_view trim(std::string_view s)
{
    auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (!s.empty() && ws(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && ws(s.back()))
        s.remove_suffix(1);
    return s;
}

std::string trim_copy(std::string_view s) { return std::string(trim(s)); }

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::vector<std::string> split_lines(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto nl = s.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < s.size())
                out.emplace_back(s.substr(start));
            break;
        }
        auto line = s.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        out.emplace_back(line);
        start = nl + 1;
    }
    return out;
}

std::string join(const std::vector<std::string> &parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

int indentation(std::string_view line)
{
    int n = 0;
    for (char c : line) {
        if (c == ' ')
            ++n;
        else if (c == '\t')
            n += 4;
        else
            break;
    }
    return n;
}

std::string normalize_space(std::string_view s)
{
    std::string out;
    bool pending = false;
    for (char c : trim(s)) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            pending = true;
            continue;
        }
        if (pending && !out.empty())
            out += ' ';
        pending = false;
        out += c;
    }
    return out;
}

char32_t next_code_point(std::string_view s, std::size_t &i)
{
    auto b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) -> unsigned {
        return i + k < s.size() ? (static_cast<unsigned char>(s[i + k]) & 0x3Fu) : 0u;
    };
    if (b0 < 0x80) {
        i += 1;
        return b0;
    }
    if ((b0 & 0xE0) == 0xC0 && i + 1 < s.size()) {
        char32_t cp = ((b0 & 0x1Fu) << 6) | cont(1);
        i += 2;
        return cp;
    }
    if ((b0 & 0xF0) == 0xE0 && i + 2 < s.size()) {
        char32_t cp = ((b0 & 0x0Fu) << 12) | (cont(1) << 6) | cont(2);
        i += 3;
        return cp;
    }
    if ((b0 & 0xF8) == 0xF0 && i + 3 < s.size()) {
        char32_t cp = ((b0 & 0x07u) << 18) | (cont(1) << 12) | (cont(2) << 6) | cont(3);
        i += 4;
        return cp;
    }
    i += 1;
    return b0;
}

bool is_identifier_char(char32_t cp)
{
    if (cp < 0x80)
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9') || cp == '_' ||
               cp == '\'' || cp == '!' || cp == '?';
    if (cp >= 0x391 && cp <= 0x3C9 && cp != 0x3BB) // Greek, except the lambda keyword
        return true;
    if (cp >= 0x2080 && cp <= 0x209C) // subscripts
        return true;
    if (cp >= 0x1D49C && cp <= 0x1D59F) // script/fraktur letters
        return true;
    return false;
}

std::vector<std::string> local_identifier_tokens(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    char32_t prev = 0;
    while (i < s.size()) {
        std::size_t start = i;
        char32_t cp = next_code_point(s, i);
        if (!is_identifier_char(cp) || cp == '\'' || cp == '!' || cp == '?') {
            prev = cp;
            continue;
        }
        std::size_t end = i;
        while (end < s.size()) {
            std::size_t j = end;
            char32_t c = next_code_point(s, j);
            if (!is_identifier_char(c))
                break;
            end = j;
        }
        std::string tok(s.substr(start, end - start));
        bool numeric = std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
        if (prev != '.' && !numeric)
            out.push_back(std::move(tok));
        i = end;
        prev = 'a';
        // Skip the remainder of a dotted chain.
        while (i < s.size() && s[i] == '.') {
            std::size_t j = i + 1;
            if (j >= s.size())
                break;
            std::size_t k = j;
            char32_t c = next_code_point(s, k);
            if (!is_identifier_char(c))
                break;
            i = j;
            while (i < s.size()) {
                std::size_t m = i;
                char32_t d = next_code_point(s, m);
                if (!is_identifier_char(d))
                    break;
                i = m;
            }
        }
    }
    return out;
}

bool references_name(std::string_view s, std::string_view name)
{
    for (const auto &tok : local_identifier_tokens(s))
        if (tok == name)
            return true;
    return false;
}

bool is_valid_identifier(std::string_view s)
{
    if (s.empty())
        return false;
    std::size_t i = 0;
    char32_t first = next_code_point(s, i);
    if (!is_identifier_char(first) || (first >= '0' && first <= '9') || first == '\'' || first == '!' || first == '?')
        return false;
    while (i < s.size())
        if (!is_identifier_char(next_code_point(s, i)))
            return false;
    return true;
}

} // namespace explorable::text
