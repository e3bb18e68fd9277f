// lean-ref: command-line front end for the reference checker.
// Usage: lean-ref [--json] FILE

#include "explorable/leanref/checker.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char **argv)
{
    bool json = false;
    const char *file = nullptr;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--version") == 0 || std::strcmp(argv[i], "-v") == 0) {
            std::cout << "lean-ref 1.0.0 (reference checker)\n";
            return 0;
        }
        if (std::strcmp(argv[i], "--json") == 0)
            json = true;
        else
            file = argv[i];
    }
    if (!file) {
        std::cerr << "usage: lean-ref [--json] FILE\n";
        return 2;
    }
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        std::cerr << "lean-ref: cannot open " << file << "\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    auto diags = explorable::leanref::check_source(buf.str());
    bool failed = false;
    for (const auto &d : diags) {
        failed = failed || d.severity == "error";
        if (json) {
            nlohmann::json j{{"fileName", file},
                             {"pos", {{"line", d.line}, {"column", d.column}}},
                             {"severity", d.severity == "info" ? "information" : d.severity},
                             {"data", d.message}};
            std::cout << j.dump() << "\n";
        }
    }
    if (!json)
        std::cout << explorable::leanref::format_diagnostics(file, diags);
    return failed ? 1 : 0;
}
