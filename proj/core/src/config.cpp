#include "lmc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lmc {

ConfigError::ConfigError(std::string field, std::string const& message)
    : std::runtime_error(field + ": " + message), field_(std::move(field))
{
}

namespace {

bool key_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool valid_key(std::string_view key)
{
    if (key.empty() || key.front() == '.' || key.back() == '.') {
        return false;
    }
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (key[i] == '.') {
            if (key[i - 1] == '.') {
                return false;
            }
        } else if (!key_char(key[i])) {
            return false;
        }
    }
    return true;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

class LineLexer
{
  public:
    LineLexer(std::string_view text, std::string where) : s_(text), where_(std::move(where)) {}

    void skip_space()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }
    bool at_end()
    {
        skip_space();
        return pos_ == s_.size() || s_[pos_] == '#';
    }
    bool accept(char c)
    {
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::string scalar()
    {
        skip_space();
        if (pos_ == s_.size()) {
            fail("expected a value");
        }
        if (s_[pos_] == '"') {
            ++pos_;
            std::string out;
            while (true) {
                if (pos_ == s_.size()) {
                    fail("unterminated string");
                }
                char c = s_[pos_++];
                if (c == '"') {
                    return out;
                }
                if (c == '\\') {
                    if (pos_ == s_.size() || (s_[pos_] != '"' && s_[pos_] != '\\')) {
                        fail("bad escape in string");
                    }
                    c = s_[pos_++];
                }
                out.push_back(c);
            }
        }
        std::size_t const start = pos_;
        while (pos_ < s_.size() && std::string_view(",#[]\"").find(s_[pos_]) == std::string_view::npos) {
            ++pos_;
        }
        auto const word = trim(s_.substr(start, pos_ - start));
        if (word.empty()) {
            fail("expected a value");
        }
        return std::string(word);
    }
    [[noreturn]] void fail(std::string const& what) const { throw ConfigError(where_, what); }

  private:
    std::string_view s_;
    std::size_t pos_ = 0;
    std::string where_;
};

bool needs_quotes(std::string const& s)
{
    if (s.empty() || s != trim(s)) {
        return true;
    }
    return s.find_first_of(",#[]\"\\") != std::string::npos;
}

std::string quote(std::string const& s)
{
    if (!needs_quotes(s)) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

double parse_double(std::string const& text, std::string const& field)
{
    double v = 0.0;
    auto const* first = text.data();
    auto const* last = text.data() + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    auto const [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw ConfigError(field, "expected a finite number, got '" + text + "'");
    }
    return v;
}

Config Config::parse(std::string_view text)
{
    Config cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto const nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        std::string const where = "line " + std::to_string(line_no);
        auto const body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        auto const eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(where, "expected 'key = value'");
        }
        std::string const key(trim(body.substr(0, eq)));
        if (!valid_key(key)) {
            throw ConfigError(where, "invalid key '" + key + "'");
        }
        if (cfg.find(key)) {
            throw ConfigError(key, "duplicate key (" + where + ")");
        }
        LineLexer lex(body.substr(eq + 1), key);
        ConfigValue value;
        value.line = line_no;
        if (lex.accept('[')) {
            value.array = true;
            if (!lex.accept(']')) {
                do {
                    value.items.push_back(lex.scalar());
                } while (lex.accept(','));
                if (!lex.accept(']')) {
                    lex.fail("expected ',' or ']'");
                }
            }
        } else {
            value.items.push_back(lex.scalar());
        }
        if (!lex.at_end()) {
            lex.fail("trailing characters after value");
        }
        cfg.entries_.emplace_back(key, std::move(value));
    }
    return cfg;
}

Config Config::load(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), "cannot open config file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string Config::serialize() const
{
    std::string out;
    for (auto const& [key, value] : entries_) {
        out += key;
        out += " = ";
        if (value.array) {
            out += '[';
            for (std::size_t i = 0; i < value.items.size(); ++i) {
                out += i ? ", " : "";
                out += quote(value.items[i]);
            }
            out += ']';
        } else {
            out += quote(value.items.front());
        }
        out += '\n';
    }
    return out;
}

ConfigValue const* Config::find(std::string const& key) const
{
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](auto const& e) { return e.first == key; });
    return it == entries_.end() ? nullptr : &it->second;
}

bool Config::has(std::string const& key) const
{
    return find(key) != nullptr;
}

void Config::set(std::string const& key, std::string value)
{
    set_array(key, {std::move(value)});
    std::find_if(entries_.begin(), entries_.end(), [&](auto const& e) { return e.first == key; })->second.array
        = false;
}

void Config::set_array(std::string const& key, std::vector<std::string> values)
{
    if (!valid_key(key)) {
        throw ConfigError(key, "invalid key");
    }
    ConfigValue v;
    v.items = std::move(values);
    v.array = true;
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](auto const& e) { return e.first == key; });
    if (it == entries_.end()) {
        entries_.emplace_back(key, std::move(v));
    } else {
        it->second = std::move(v);
    }
}

void Config::erase(std::string const& key)
{
    std::erase_if(entries_, [&](auto const& e) { return e.first == key; });
}

ConfigValue const& Config::raw(std::string const& key) const
{
    auto const* v = find(key);
    if (!v) {
        throw ConfigError(key, "missing required key");
    }
    used_.insert(key);
    return *v;
}

std::string const& Config::scalar(std::string const& key) const
{
    auto const& v = raw(key);
    if (v.array) {
        throw ConfigError(key, "expected a scalar, got an array");
    }
    return v.items.front();
}

std::string Config::get_string(std::string const& key) const
{
    return scalar(key);
}

std::string Config::get_string(std::string const& key, std::string const& fallback) const
{
    return has(key) ? scalar(key) : fallback;
}

double Config::get_double(std::string const& key) const
{
    return parse_double(scalar(key), key);
}

double Config::get_double(std::string const& key, double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

std::optional<double> Config::get_optional_double(std::string const& key) const
{
    if (!has(key)) {
        return std::nullopt;
    }
    return get_double(key);
}

std::uint64_t Config::get_uint(std::string const& key, std::uint64_t fallback) const
{
    if (!has(key)) {
        return fallback;
    }
    auto const& s = scalar(key);
    std::uint64_t v = 0;
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError(key, "expected a non-negative integer, got '" + s + "'");
    }
    return v;
}

bool Config::get_bool(std::string const& key, bool fallback) const
{
    if (!has(key)) {
        return fallback;
    }
    auto const& s = scalar(key);
    if (s == "true") {
        return true;
    }
    if (s == "false") {
        return false;
    }
    throw ConfigError(key, "expected true or false, got '" + s + "'");
}

std::vector<double> Config::get_doubles(std::string const& key, std::vector<double> const& fallback) const
{
    if (!has(key)) {
        return fallback;
    }
    std::vector<double> out;
    for (auto const& item : raw(key).items) {
        out.push_back(parse_double(item, key));
    }
    return out;
}

std::vector<std::string> Config::get_strings(std::string const& key,
                                             std::vector<std::string> const& fallback) const
{
    return has(key) ? raw(key).items : fallback;
}

std::vector<std::string> Config::keys() const
{
    std::vector<std::string> out;
    for (auto const& e : entries_) {
        out.push_back(e.first);
    }
    return out;
}

std::vector<std::string> Config::unused_keys() const
{
    std::vector<std::string> out;
    for (auto const& e : entries_) {
        if (!used_.count(e.first)) {
            out.push_back(e.first);
        }
    }
    return out;
}

void Config::reject_unused() const
{
    auto const unused = unused_keys();
    if (!unused.empty()) {
        throw ConfigError(unused.front(), "unknown key");
    }
}

} // namespace lmc
