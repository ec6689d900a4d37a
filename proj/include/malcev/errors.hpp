#pragma once

#include <stdexcept>
#include <string>

namespace malcev {

// Every library error carries a stable machine-readable code plus a witness
// string (the basis pair/triple, simplex, or location that violated the
// condition). The CLI maps codes onto exit codes.
class Error : public std::runtime_error {
public:
  Error(std::string code, std::string witness)
      : std::runtime_error(code + ": " + witness),
        code_(std::move(code)),
        witness_(std::move(witness)) {}

  const std::string& code() const { return code_; }
  const std::string& witness() const { return witness_; }

private:
  std::string code_;
  std::string witness_;
};

namespace errc {
inline constexpr const char* parse = "ParseError";
inline constexpr const char* not_associative = "NotAssociative";
inline constexpr const char* not_graded_commutative = "NotGradedCommutative";
inline constexpr const char* not_connected = "NotConnected";
inline constexpr const char* unit_missing = "UnitMissing";
inline constexpr const char* unknown_basis_label = "UnknownBasisLabel";
inline constexpr const char* degree_out_of_range = "DegreeOutOfRange";
inline constexpr const char* degree_mismatch = "DegreeMismatch";
inline constexpr const char* truncation_too_large = "TruncationTooLarge";
inline constexpr const char* sign_convention_failure = "SignConventionFailure";
inline constexpr const char* not_mc = "NotMC";
inline constexpr const char* not_a_cycle = "NotACycle";
inline constexpr const char* simplicial_identity = "SimplicialIdentityViolation";
inline constexpr const char* not_reduced = "NotReduced";
inline constexpr const char* enumeration_budget = "EnumerationBudgetExceeded";
inline constexpr const char* not_a_cocycle = "NotACocycle";
inline constexpr const char* not_surjective_monodromy = "NotSurjectiveMonodromy";
}  // namespace errc

// True for errors that indicate an exhausted resource guard rather than
// invalid input.
inline bool is_resource_error(const Error& e) {
  return e.code() == errc::truncation_too_large ||
         e.code() == errc::enumeration_budget;
}

}  // namespace malcev
