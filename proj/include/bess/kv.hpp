#pragma once

#include <string>
#include <vector>

namespace bess {

/// One `key = value` line of a sectioned key-value file, in file order.
/// Sections repeat (curve files rely on this), so entries keep their
/// source line for error messages.
struct KvEntry {
    std::string section;
    std::string key;
    std::string value;
    int line;
};

/// Parse a sectioned key-value file: `[section]` headers, `key = value`
/// lines, `#` comments, blank lines ignored. Throws ConfigError with the
/// line number on malformed input.
std::vector<KvEntry> parse_kv_file(const std::string& path);

/// Same, from an in-memory string (used by tests and round-trip checks).
std::vector<KvEntry> parse_kv_text(const std::string& text, const std::string& origin);

/// Value parsers that name the dotted key and line on failure.
double kv_double(const KvEntry& e);
long long kv_int(const KvEntry& e);

}  // namespace bess
