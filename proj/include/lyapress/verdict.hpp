#ifndef LYAPRESS_VERDICT_HPP
#define LYAPRESS_VERDICT_HPP

#include <string>

#include <json.hpp>

namespace lyapress {

enum class CheckKind {
    FiberBunched,
    Pinching,
    Twisting,
    Typical,
    QuasiMultiplicative,
    Dominated,
};

enum class VerdictState { Pass, Fail, Inconclusive };

std::string to_string(CheckKind kind);
std::string to_string(VerdictState state);

/// Empirical structural verdict.  A pass carries a positive margin above the
/// declared tolerance, a fail carries an explicit witness; neither claims a
/// proof.
struct StructureVerdict {
    CheckKind kind;
    VerdictState verdict = VerdictState::Inconclusive;
    double margin = 0.0;
    int index = -1;                 // dominated-with-index-i; -1 otherwise
    nlohmann::ordered_json witness; // eigenvalues, word K, minimal minor, gap fit, ...

    bool passed() const { return verdict == VerdictState::Pass; }
};

} // namespace lyapress

#endif
