#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace explorable::text {

std::string_view trim(std::string_view s);
std::string trim_copy(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string> &parts, std::string_view sep);
int indentation(std::string_view line);
// Collapses runs of ASCII whitespace into a single space and trims.
std::string normalize_space(std::string_view s);

// Decodes one UTF-8 code point starting at s[i]; advances i. Invalid bytes decode as themselves.
char32_t next_code_point(std::string_view s, std::size_t &i);
bool is_identifier_char(char32_t cp);

// Identifier tokens that can name a local (heads of dotted chains only), in order of appearance.
std::vector<std::string> local_identifier_tokens(std::string_view s);
bool references_name(std::string_view s, std::string_view name);

bool is_valid_identifier(std::string_view s);

} // namespace explorable::text
