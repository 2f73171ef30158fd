#ifndef LYAPRESS_ERRORS_HPP
#define LYAPRESS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lyapress {

// Exit-code classes: BudgetExceeded maps to 3, everything else to 2.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error("validation: " + msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error("parse: " + msg) {}
};

struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& msg) : Error("budget: " + msg) {}
};

struct InadmissibleWord : Error {
    explicit InadmissibleWord(const std::string& msg) : Error("inadmissible word: " + msg) {}
};

struct NotPrimitive : Error {
    explicit NotPrimitive(const std::string& msg) : Error("not primitive: " + msg) {}
};

struct SingularMatrix : Error {
    explicit SingularMatrix(const std::string& msg) : Error("singular matrix: " + msg) {}
};

struct NegativeS : Error {
    explicit NegativeS(const std::string& msg) : Error("negative s: " + msg) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg) : Error("no convergence: " + msg) {}
};

struct NotOnStableSet : Error {
    explicit NotOnStableSet(const std::string& msg) : Error("not on stable/unstable set: " + msg) {}
};

struct ResolutionTooCoarse : Error {
    explicit ResolutionTooCoarse(const std::string& msg) : Error("resolution too coarse: " + msg) {}
};

struct TargetOutsideDomain : Error {
    explicit TargetOutsideDomain(const std::string& msg) : Error("target outside domain: " + msg) {}
};

struct CombinatorialBudget : Error {
    explicit CombinatorialBudget(const std::string& msg) : Error("combinatorial budget: " + msg) {}
};

struct SearchExhausted : Error {
    explicit SearchExhausted(const std::string& msg) : Error("search exhausted: " + msg) {}
};

} // namespace lyapress

#endif
