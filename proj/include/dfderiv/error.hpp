#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dfderiv {

/** Machine-readable error categories. The names double as the `code` field in reports. */
enum class ErrorCode {
    malformed_descriptor,
    declared_fact_refuted,
    non_unital_module,
    carrier_mismatch,
    infinite_carrier,
    not_two_sided,
    closure_failure,
    unsupported_carrier,
    non_integral_scaling,
    prereq_failed,
    not_invariant,
    hypothesis_unmet,
    unknown_lemma,
    budget_exceeded,
    not_finite,
    hypothesis_failed,
    parse_error,
    resolve_error,
    validation_error,
    carrier_too_large,
};

constexpr std::string_view error_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::malformed_descriptor: return "MalformedDescriptor";
    case ErrorCode::declared_fact_refuted: return "DeclaredFactRefuted";
    case ErrorCode::non_unital_module: return "NonUnitalModule";
    case ErrorCode::carrier_mismatch: return "CarrierMismatch";
    case ErrorCode::infinite_carrier: return "InfiniteCarrier";
    case ErrorCode::not_two_sided: return "NotTwoSided";
    case ErrorCode::closure_failure: return "ClosureFailure";
    case ErrorCode::unsupported_carrier: return "UnsupportedCarrier";
    case ErrorCode::non_integral_scaling: return "NonIntegralScaling";
    case ErrorCode::prereq_failed: return "PrereqFailed";
    case ErrorCode::not_invariant: return "NotInvariant";
    case ErrorCode::hypothesis_unmet: return "HypothesisUnmet";
    case ErrorCode::unknown_lemma: return "UnknownLemma";
    case ErrorCode::budget_exceeded: return "BudgetExceeded";
    case ErrorCode::not_finite: return "NotFinite";
    case ErrorCode::hypothesis_failed: return "HypothesisFailed";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::resolve_error: return "ResolveError";
    case ErrorCode::validation_error: return "ValidationError";
    case ErrorCode::carrier_too_large: return "CarrierTooLarge";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace dfderiv
