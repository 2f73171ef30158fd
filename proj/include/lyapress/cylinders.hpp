#ifndef LYAPRESS_CYLINDERS_HPP
#define LYAPRESS_CYLINDERS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lyapress/cocycle.hpp"

namespace lyapress {

struct SweepOptions {
    std::uint64_t budget = std::uint64_t{1} << 22;
    int threads = 0;            // 0: resolve from environment / hardware
};

/// Per-cylinder data handed to sweep visitors.  `candidates` holds the log
/// singular value vectors (d entries each) of the cocycle product for every
/// admissible window extension of the word, in lexicographic extension
/// order; one-step cocycles have exactly one candidate.
struct CylinderView {
    std::uint64_t index = 0;               // lexicographic rank within L_n
    std::span<const int> word;             // n symbols
    std::span<const double> candidates;    // num_candidates * d log-sigmas
    int d = 0;
    int num_candidates() const { return static_cast<int>(candidates.size()) / d; }
    std::span<const double> candidate(int j) const {
        return candidates.subspan(static_cast<std::size_t>(j) * d, d);
    }
};

/// Serial lexicographic sweep; the visitor sees every word of length n once.
void sweep_cylinders(const CocycleSpec& c, int n, std::uint64_t budget,
                     const std::function<void(const CylinderView&)>& visitor);

/// Type-erased parallel block sweep.  Blocks are fixed prefix subtrees
/// (independent of thread count) numbered in lexicographic order; `prepare`
/// receives the block count before any leaf runs.
void sweep_blocks(const CocycleSpec& c, int n, const SweepOptions& opts,
                  const std::function<void(std::size_t)>& prepare,
                  const std::function<void(std::size_t, const CylinderView&)>& leaf);

/// Deterministic parallel sweep with ordered merge: leaf results are
/// accumulated per block and merged in block order, so any thread count
/// produces bit-identical results.
template <typename State>
State sweep_accumulate(const CocycleSpec& c, int n, const SweepOptions& opts,
                       const std::function<void(State&, const CylinderView&)>& leaf,
                       const std::function<void(State&, const State&)>& merge,
                       State init) {
    std::vector<State> partial;
    sweep_blocks(
        c, n, opts, [&](std::size_t blocks) { partial.assign(blocks, init); },
        [&](std::size_t b, const CylinderView& view) { leaf(partial[b], view); });
    State out = std::move(init);
    for (const State& s : partial) merge(out, s);
    return out;
}

/// Cached table of per-cylinder log singular values for fast repeated
/// evaluation of q-dependent functionals at fixed depth n.
class CylinderTable {
public:
    static CylinderTable build(const CocycleSpec& c, int n, const SweepOptions& opts = {});

    int depth() const { return n_; }
    int dimension() const { return d_; }
    std::uint64_t num_words() const { return words_; }

    /// Representative log-sigma vector of word i (max-norm extension).
    std::span<const double> representative(std::uint64_t i) const;
    /// All candidate vectors of word i (flattened, d per candidate).
    std::span<const double> candidates(std::uint64_t i) const;
    int num_candidates(std::uint64_t i) const;

    /// log Z_n(q) = log sum over words of max over candidates of exp<q, v>.
    /// Deterministic log-sum-exp (global max offset + pairwise tree).
    double log_partition(std::span<const double> q) const;

    /// max over words of <q, representative>; used by Legendre gradients.
    void word_values(std::span<const double> q, std::vector<double>& out) const;

private:
    int n_ = 0, d_ = 0;
    bool one_step_ = true;
    std::uint64_t words_ = 0;
    std::vector<double> sigma_;            // representative vectors, words * d
    std::vector<double> all_;              // candidate vectors (empty if one_step_)
    std::vector<std::uint64_t> offsets_;   // per-word candidate offsets (empty if one_step_)
};

} // namespace lyapress

#endif
