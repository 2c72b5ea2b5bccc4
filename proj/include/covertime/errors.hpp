#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace covertime {

// Coarse classification used by the CLI to pick exit codes.
enum class ErrorCategory { parse, domain, budget };

// Base of every error raised by the library. `kind()` is a stable
// machine-readable tag, `what()` the human-readable message.
class Error : public std::runtime_error {
public:
    Error(std::string kind, ErrorCategory category, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)), category_(category) {}

    const std::string& kind() const noexcept { return kind_; }
    ErrorCategory category() const noexcept { return category_; }

private:
    std::string kind_;
    ErrorCategory category_;
};

// ---- rational parsing ------------------------------------------------------

struct MalformedRational final : Error {
    explicit MalformedRational(const std::string& text)
        : Error("MalformedRational", ErrorCategory::domain,
                "not a rational literal: '" + text + "'") {}
};

// Probabilities must be exact "p/q" or integer strings; "0.5" is refused
// rather than silently converted.
struct FloatLiteralRejected final : Error {
    explicit FloatLiteralRejected(const std::string& text)
        : Error("FloatLiteralRejected", ErrorCategory::domain,
                "floating-point literal rejected, write an exact fraction: '" + text + "'") {}
};

struct NegativeOrZeroDenominator final : Error {
    explicit NegativeOrZeroDenominator(const std::string& text)
        : Error("NegativeOrZeroDenominator", ErrorCategory::domain,
                "denominator must be a positive integer: '" + text + "'") {}
};

// ---- chain validation ------------------------------------------------------

struct EmptyChain final : Error {
    EmptyChain()
        : Error("EmptyChain", ErrorCategory::domain, "chain has no states") {}
};

struct ProbabilityOutOfRange final : Error {
    ProbabilityOutOfRange(const std::string& from, const std::string& to,
                          const std::string& value)
        : Error("ProbabilityOutOfRange", ErrorCategory::domain,
                "edge " + from + " -> " + to + " has probability " + value +
                    " outside (0, 1]") {}
};

struct DuplicateEdge final : Error {
    DuplicateEdge(const std::string& from, const std::string& to)
        : Error("DuplicateEdge", ErrorCategory::domain,
                "edge " + from + " -> " + to + " listed twice") {}
};

struct RowSumMismatch final : Error {
    RowSumMismatch(std::string state_label, std::string actual_sum)
        : Error("RowSumMismatch", ErrorCategory::domain,
                "outgoing probabilities of state '" + state_label + "' sum to " +
                    actual_sum + ", expected exactly 1"),
          state(std::move(state_label)), actual(std::move(actual_sum)) {}

    std::string state;
    std::string actual;
};

struct UnknownStateLabel final : Error {
    explicit UnknownStateLabel(const std::string& label)
        : Error("UnknownStateLabel", ErrorCategory::domain,
                "unknown state label '" + label + "'") {}
};

// Structurally invalid chain file (wrong JSON shape, bad labels, ...).
struct ChainFormatError final : Error {
    explicit ChainFormatError(const std::string& message)
        : Error("ChainFormatError", ErrorCategory::parse, message) {}
};

// ---- linear algebra --------------------------------------------------------

struct DimensionMismatch final : Error {
    explicit DimensionMismatch(const std::string& message)
        : Error("DimensionMismatch", ErrorCategory::domain, message) {}
};

struct SingularMatrix final : Error {
    SingularMatrix()
        : Error("SingularMatrix", ErrorCategory::domain,
                "matrix is singular: elimination ran out of pivots") {}
};

// ---- hitting ---------------------------------------------------------------

struct EmptyTargetSet final : Error {
    EmptyTargetSet()
        : Error("EmptyTargetSet", ErrorCategory::domain, "target set is empty") {}
};

// The assembled hitting system failed the weak chained-dominance certificate.
// Valid inputs can never trigger this; it flags an implementation bug.
struct InternalNonWcdd final : Error {
    InternalNonWcdd()
        : Error("InternalNonWcdd", ErrorCategory::domain,
                "assembled hitting system is not weakly chained diagonally dominant") {}
};

struct InternalError final : Error {
    explicit InternalError(const std::string& message)
        : Error("InternalError", ErrorCategory::domain, "internal invariant violated: " + message) {}
};

// ---- auxiliary chain / simulation ------------------------------------------

struct StateSpaceBudgetExceeded final : Error {
    StateSpaceBudgetExceeded(std::size_t budget)
        : Error("StateSpaceBudgetExceeded", ErrorCategory::budget,
                "auxiliary chain exceeds the state budget of " + std::to_string(budget) +
                    " states") {}
};

struct AllTrialsTruncated final : Error {
    AllTrialsTruncated(std::uint64_t max_steps)
        : Error("AllTrialsTruncated", ErrorCategory::domain,
                "every trial hit the step cap of " + std::to_string(max_steps) +
                    "; the target may be unreachable or max_steps too small") {}
};

}  // namespace covertime
