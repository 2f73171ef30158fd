#include "lyapress/verdict.hpp"

namespace lyapress {

std::string to_string(CheckKind kind) {
    switch (kind) {
        case CheckKind::FiberBunched: return "fiber-bunched";
        case CheckKind::Pinching: return "pinching";
        case CheckKind::Twisting: return "twisting";
        case CheckKind::Typical: return "typical";
        case CheckKind::QuasiMultiplicative: return "qm";
        case CheckKind::Dominated: return "dominated";
    }
    return "unknown";
}

std::string to_string(VerdictState state) {
    switch (state) {
        case VerdictState::Pass: return "pass";
        case VerdictState::Fail: return "fail";
        case VerdictState::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

} // namespace lyapress
