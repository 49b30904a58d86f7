#include "flowmc/value.hpp"

#include "flowmc/error.hpp"

#include <sstream>

namespace flowmc {

std::string Value::to_string() const
{
    if (is_bool_)
        return raw_ ? "true" : "false";
    return std::to_string(raw_);
}

std::string to_string(Type t)
{
    return t == Type::Bool ? "bool" : "int";
}

bool Domain::contains(const Value& v) const
{
    switch (kind) {
    case Kind::Bool:
        return v.is_bool();
    case Kind::Range:
        return v.is_int() && v.as_int() >= lo && v.as_int() <= hi;
    case Kind::Unbounded:
        return v.is_int();
    }
    return false;
}

std::vector<Value> Domain::values() const
{
    switch (kind) {
    case Kind::Bool:
        return {Value::boolean(false), Value::boolean(true)};
    case Kind::Range: {
        std::vector<Value> out;
        for (std::int64_t i = lo; i <= hi; ++i)
            out.push_back(Value::integer(i));
        return out;
    }
    case Kind::Unbounded:
        break;
    }
    throw Error(ErrorCode::InfiniteDomain, "unbounded integer domain cannot be enumerated");
}

std::size_t Domain::size() const
{
    switch (kind) {
    case Kind::Bool:
        return 2;
    case Kind::Range:
        return hi < lo ? 0 : static_cast<std::size_t>(hi - lo + 1);
    case Kind::Unbounded:
        break;
    }
    throw Error(ErrorCode::InfiniteDomain, "unbounded integer domain has no size");
}

std::string Domain::to_string() const
{
    switch (kind) {
    case Kind::Bool:
        return "bool";
    case Kind::Range:
        return "int " + std::to_string(lo) + ".." + std::to_string(hi);
    case Kind::Unbounded:
        return "int";
    }
    return "?";
}

std::string to_string(const Valuation& v)
{
    std::ostringstream os;
    bool first = true;
    for (const auto& [name, value] : v) {
        if (!first)
            os << ", ";
        first = false;
        os << name << '=' << value.to_string();
    }
    return os.str();
}

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::UnsupportedStatement: return "UnsupportedStatement";
    case ErrorCode::EmptyContract: return "EmptyContract";
    case ErrorCode::PrimedInGuard: return "PrimedInGuard";
    case ErrorCode::InfiniteDomain: return "InfiniteDomain";
    case ErrorCode::CyclicUnannotatedJumps: return "CyclicUnannotatedJumps";
    case ErrorCode::UnreachableExit: return "UnreachableExit";
    case ErrorCode::UnsupportedReturnPoint: return "UnsupportedReturnPoint";
    case ErrorCode::DeadEndPoint: return "DeadEndPoint";
    case ErrorCode::UnknownProcedure: return "UnknownProcedure";
    case ErrorCode::UnsatisfiableInit: return "UnsatisfiableInit";
    case ErrorCode::MalformedConfiguration: return "MalformedConfiguration";
    case ErrorCode::NonGlobalVariable: return "NonGlobalVariable";
    case ErrorCode::NoInitialConfiguration: return "NoInitialConfiguration";
    case ErrorCode::NonTotalFlowGraph: return "NonTotalFlowGraph";
    case ErrorCode::UnsupportedLabel: return "UnsupportedLabel";
    case ErrorCode::BoundMismatch: return "BoundMismatch";
    case ErrorCode::UnboundedDomain: return "UnboundedDomain";
    case ErrorCode::CapacityTooSmall: return "CapacityTooSmall";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

std::string Diagnostic::to_string() const
{
    std::ostringstream os;
    if (line > 0)
        os << line << ':' << column << ": ";
    os << code << ": " << message;
    if (!path.empty())
        os << " [" << path << ']';
    return os.str();
}

bool has_code(const Diagnostics& diags, const std::string& code)
{
    for (const auto& d : diags)
        if (d.code == code)
            return true;
    return false;
}

}  // namespace flowmc
