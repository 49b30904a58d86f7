#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flowmc {

/// A scalar program value: an integer or a boolean.
class Value {
public:
    Value() = default;

    static Value integer(std::int64_t v) { return Value(false, v); }
    static Value boolean(bool b) { return Value(true, b ? 1 : 0); }

    bool is_bool() const { return is_bool_; }
    bool is_int() const { return !is_bool_; }
    std::int64_t as_int() const { return raw_; }
    bool as_bool() const { return raw_ != 0; }

    auto operator<=>(const Value&) const = default;

    /// `true`/`false` for booleans, decimal otherwise.
    std::string to_string() const;

private:
    Value(bool is_bool, std::int64_t raw) : is_bool_(is_bool), raw_(raw) {}

    bool is_bool_ = false;
    std::int64_t raw_ = 0;
};

enum class Type { Int, Bool };

std::string to_string(Type t);

/// Declared value set of a variable.
struct Domain {
    enum class Kind { Bool, Range, Unbounded };

    Kind kind = Kind::Bool;
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    static Domain boolean() { return {Kind::Bool, 0, 0}; }
    static Domain range(std::int64_t lo, std::int64_t hi) { return {Kind::Range, lo, hi}; }
    static Domain unbounded() { return {Kind::Unbounded, 0, 0}; }

    bool finite() const { return kind != Kind::Unbounded; }
    Type type() const { return kind == Kind::Bool ? Type::Bool : Type::Int; }
    bool contains(const Value& v) const;

    /// Members in ascending order; throws InfiniteDomain for unbounded integers.
    std::vector<Value> values() const;
    std::size_t size() const;

    /// `bool`, `int lo..hi` or `int`.
    std::string to_string() const;

    bool operator==(const Domain&) const = default;
};

/// Variable name to value. Ordered so that iteration (and thus printing,
/// hashing and enumeration) is deterministic.
using Valuation = std::map<std::string, Value>;

std::string to_string(const Valuation& v);

}  // namespace flowmc
