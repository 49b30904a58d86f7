#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flowmc {

enum class ErrorCode {
    SyntaxError,
    DuplicateName,
    DanglingReference,
    UnboundVariable,
    UnknownVariable,
    TypeError,
    UnsupportedStatement,
    EmptyContract,
    PrimedInGuard,
    InfiniteDomain,
    CyclicUnannotatedJumps,
    UnreachableExit,
    UnsupportedReturnPoint,
    DeadEndPoint,
    UnknownProcedure,
    UnsatisfiableInit,
    MalformedConfiguration,
    NonGlobalVariable,
    NoInitialConfiguration,
    NonTotalFlowGraph,
    UnsupportedLabel,
    BoundMismatch,
    UnboundedDomain,
    CapacityTooSmall,
    InvalidArgument,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

/// A non-fatal finding attached to a source position or an entity path
/// such as `procedure main/block b1/point p3`.
struct Diagnostic {
    std::string code;
    std::string message;
    std::string path;
    int line = 0;
    int column = 0;

    std::string to_string() const;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_code(const Diagnostics& diags, const std::string& code);

}  // namespace flowmc
