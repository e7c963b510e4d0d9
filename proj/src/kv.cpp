#include "bess/kv.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bess/core.hpp"

namespace bess {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<KvEntry> parse_kv_text(const std::string& text, const std::string& origin) {
    std::vector<KvEntry> out;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        // strip trailing comment
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line) +
                                  ": unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(line) + ": empty section name");
            out.push_back({section, "", "", line});  // section marker, keeps curve order
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line) +
                              ": expected `key = value`, got `" + s + "`");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line) + ": empty key");
        out.push_back({section, key, value, line});
    }
    return out;
}

std::vector<KvEntry> parse_kv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_kv_text(buf.str(), path);
}

double kv_double(const KvEntry& e) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError("line " + std::to_string(e.line) + ": key `" + e.section + "." +
                          e.key + "`: not a number: `" + e.value + "`");
    return v;
}

long long kv_int(const KvEntry& e) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError("line " + std::to_string(e.line) + ": key `" + e.section + "." +
                          e.key + "`: not an integer: `" + e.value + "`");
    return v;
}

}  // namespace bess
