#include "planevortex/toml_lite.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pv {

namespace {

using nlohmann::json;

[[noreturn]] void fail(int line, const std::string& what) {
    throw std::runtime_error("config parse error at line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Remove a # comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
        if (c == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

std::string parse_string(const std::string& raw, int line) {
    if (raw.size() < 2 || raw.back() != '"') fail(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
        char c = raw[i];
        if (c == '\\') {
            if (i + 2 >= raw.size()) fail(line, "dangling escape");
            char e = raw[++i];
            switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: fail(line, std::string("unsupported escape \\") + e);
            }
        } else {
            out += c;
        }
    }
    return out;
}

json parse_scalar(const std::string& raw, int line) {
    if (raw.empty()) fail(line, "missing value");
    if (raw.front() == '"') return parse_string(raw, line);
    if (raw == "true") return true;
    if (raw == "false") return false;
    // integer first, then float
    if (raw.find_first_of(".eE") == std::string::npos || raw.find("0x") == 0) {
        char* end = nullptr;
        long long v = std::strtoll(raw.c_str(), &end, 10);
        if (end && *end == '\0') return v;
    }
    char* end = nullptr;
    double d = std::strtod(raw.c_str(), &end);
    if (end && *end == '\0') return d;
    fail(line, "cannot parse value '" + raw + "'");
}

// Split a bracketed array body on top-level commas.
json parse_value(const std::string& raw, int line);

json parse_array(const std::string& raw, int line) {
    json arr = json::array();
    std::string body = raw.substr(1, raw.size() - 2);
    int depth = 0;
    bool quoted = false;
    std::string cur;
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c == '"' && (i == 0 || body[i - 1] != '\\')) quoted = !quoted;
        if (!quoted && depth == 0 && c == ',') {
            std::string item = trim(cur);
            if (item.empty()) fail(line, "empty array element");
            arr.push_back(parse_value(item, line));
            cur.clear();
            continue;
        }
        if (!quoted) {
            if (c == '[') ++depth;
            if (c == ']') --depth;
        }
        cur += c;
    }
    std::string tail = trim(cur);
    if (!tail.empty()) arr.push_back(parse_value(tail, line));
    return arr;
}

json parse_value(const std::string& raw, int line) {
    if (!raw.empty() && raw.front() == '[') {
        if (raw.back() != ']') fail(line, "unterminated array");
        return parse_array(raw, line);
    }
    return parse_scalar(raw, line);
}

std::vector<std::string> split_key(const std::string& key, int line) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : key) {
        if (c == '.') {
            if (cur.empty()) fail(line, "empty key segment");
            parts.push_back(cur);
            cur.clear();
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
            cur += c;
        } else {
            fail(line, "bad key character '" + std::string(1, c) + "'");
        }
    }
    if (cur.empty()) fail(line, "empty key");
    parts.push_back(cur);
    return parts;
}

json* descend(json& root, const std::vector<std::string>& parts, int line) {
    json* node = &root;
    for (const std::string& p : parts) {
        if (!node->is_object()) fail(line, "key collides with a scalar");
        node = &(*node)[p];
    }
    return node;
}

}  // namespace

nlohmann::json parse_config_text(const std::string& text) {
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded()) throw std::runtime_error("config parse error: invalid JSON");
        return j;
    }

    json root = json::object();
    json* section = &root;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        int start_line = lineno;
        std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3) fail(lineno, "malformed section header");
            std::vector<std::string> parts = split_key(trim(s.substr(1, s.size() - 2)), lineno);
            section = descend(root, parts, lineno);
            if (!section->is_object() && !section->is_null())
                fail(lineno, "section name collides with a value");
            if (section->is_null()) *section = json::object();
            continue;
        }
        std::size_t eq = std::string::npos;
        {
            bool quoted = false;
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
                if (s[i] == '=' && !quoted) {
                    eq = i;
                    break;
                }
            }
        }
        if (eq == std::string::npos) fail(lineno, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(lineno, "empty key");
        // allow arrays to continue across lines until brackets balance
        if (!value.empty() && value.front() == '[') {
            auto balance = [](const std::string& v) {
                int depth = 0;
                bool quoted = false;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (v[i] == '"' && (i == 0 || v[i - 1] != '\\')) quoted = !quoted;
                    if (quoted) continue;
                    if (v[i] == '[') ++depth;
                    if (v[i] == ']') --depth;
                }
                return depth;
            };
            while (balance(value) > 0 && std::getline(in, line)) {
                ++lineno;
                value += " " + trim(strip_comment(line));
            }
            if (balance(value) != 0) fail(start_line, "unterminated array");
        }
        std::vector<std::string> parts = split_key(key, start_line);
        std::string leaf = parts.back();
        parts.pop_back();
        json* node = parts.empty() ? section : descend(*section, parts, start_line);
        if (node->contains(leaf)) fail(start_line, "duplicate key '" + leaf + "'");
        (*node)[leaf] = parse_value(value, start_line);
    }
    return root;
}

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace pv
