#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lmc {

/// Invalid configuration. field() is the dotted key path (or "line N" for
/// syntax errors).
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string field, std::string const& message);

    std::string const& field() const noexcept { return field_; }

  private:
    std::string field_;
};

struct ConfigValue
{
    std::vector<std::string> items;
    bool array = false;
    std::size_t line = 0;
};

//---------------------------------------------------------------------------//
/*!
 * Flat `key.path = value` configuration.
 *
 * Grammar (one entry per line):
 *
 *     line    := blank | comment | key '=' value [comment]
 *     comment := '#' any text
 *     key     := [A-Za-z0-9_-]+ ('.' [A-Za-z0-9_-]+)*
 *     value   := scalar | '[' [scalar (',' scalar)*] ']'
 *     scalar  := bare word without ',#[]"' | '"' chars with \" and \\ '"'
 *
 * Keys may appear once. Typed getters record which keys were read so unused
 * (misspelt) keys can be reported.
 */
class Config
{
  public:
    static Config parse(std::string_view text);
    static Config load(std::filesystem::path const& path);

    /// Canonical text; parse(serialize()) reproduces the same entries.
    std::string serialize() const;

    bool has(std::string const& key) const;
    void set(std::string const& key, std::string value);
    void set_array(std::string const& key, std::vector<std::string> values);
    void erase(std::string const& key);

    std::string get_string(std::string const& key) const;
    std::string get_string(std::string const& key, std::string const& fallback) const;
    double get_double(std::string const& key) const;
    double get_double(std::string const& key, double fallback) const;
    std::uint64_t get_uint(std::string const& key, std::uint64_t fallback) const;
    bool get_bool(std::string const& key, bool fallback) const;
    std::optional<double> get_optional_double(std::string const& key) const;
    std::vector<double> get_doubles(std::string const& key, std::vector<double> const& fallback) const;
    std::vector<std::string> get_strings(std::string const& key, std::vector<std::string> const& fallback) const;

    /// Keys in insertion order.
    std::vector<std::string> keys() const;
    ConfigValue const& raw(std::string const& key) const;

    /// Keys never passed to a getter.
    std::vector<std::string> unused_keys() const;
    /// Throws ConfigError for the first unused key.
    void reject_unused() const;

  private:
    ConfigValue const* find(std::string const& key) const;
    std::string const& scalar(std::string const& key) const;

    std::vector<std::pair<std::string, ConfigValue>> entries_;
    mutable std::set<std::string> used_;
};

/// Parses a double; throws ConfigError naming `field`.
double parse_double(std::string const& text, std::string const& field);

} // namespace lmc
