#include "lyapress/cylinders.hpp"

#include <algorithm>
#include <cmath>

#include "lyapress/errors.hpp"
#include "lyapress/numeric.hpp"
#include "lyapress/parallel.hpp"

namespace lyapress {

namespace {

void multiply_into(ScaledMatrix& dst, const Matrix& gen, const ScaledMatrix& src) {
    dst.m.noalias() = gen * src.m;
    dst.log_scale = src.log_scale;
    dst.renormalize();
}

// Depth-first walk over the determining blocks (length n + w - 1) of all
// length-n cylinders under a fixed prefix, calling `on_word` once per word in
// lexicographic order with the candidate log-sigma vectors of all extensions.
class BlockWalker {
public:
    BlockWalker(const CocycleSpec& c, int n)
        : c_(c), sft_(c.sft()), n_(n), w_(c.window()), d_(c.dimension()),
          big_l_(c.determining_length(n)), block_(big_l_, 0) {
        stack_.resize(big_l_ + 1);
        for (auto& s : stack_) s = ScaledMatrix::identity(d_);
    }

    // prefix: already-fixed leading symbols (possibly empty)
    void run(std::span<const int> prefix,
             const std::function<void(std::span<const int>, std::span<const double>)>& on_word) {
        on_word_ = &on_word;
        const int s = static_cast<int>(prefix.size());
        for (int i = 0; i < s; ++i) {
            block_[i] = prefix[i];
            push_factor(i);
        }
        descend(s);
    }

private:
    const CocycleSpec& c_;
    const SubshiftSpec& sft_;
    int n_, w_, d_, big_l_;
    std::vector<int> block_;
    std::vector<ScaledMatrix> stack_;
    std::vector<double> cand_;
    const std::function<void(std::span<const int>, std::span<const double>)>* on_word_ = nullptr;

    // After placing block_[pos], factor t = pos - w + 1 is complete.
    void push_factor(int pos) {
        const int t = pos - w_ + 1;
        if (t < 0) {
            stack_[pos + 1] = stack_[pos];
            return;
        }
        const Matrix& gen = c_.generator(std::span<const int>(block_).subspan(t, w_));
        multiply_into(stack_[pos + 1], gen, stack_[pos]);
    }

    void emit_leaf(int pos) {
        const Vector ls = stack_[pos + 1].log_sigma();
        for (int i = 0; i < d_; ++i) cand_.push_back(ls(i));
    }

    void descend(int pos) {
        if (pos == n_) {     // word complete (only reachable when w > 1)
            cand_.clear();
            extend(pos);
            (*on_word_)(std::span<const int>(block_.data(), n_), cand_);
            return;
        }
        const int k = sft_.alphabet_size();
        for (int s = 0; s < k; ++s) {
            if (pos > 0 && !sft_.transition(block_[pos - 1], s)) continue;
            block_[pos] = s;
            push_factor(pos);
            if (pos == n_ - 1 && big_l_ == n_) {   // one-step leaf == word end
                cand_.clear();
                emit_leaf(pos);
                (*on_word_)(std::span<const int>(block_.data(), n_), cand_);
            } else {
                descend(pos + 1);
            }
        }
    }

    void extend(int pos) {
        const int k = sft_.alphabet_size();
        for (int s = 0; s < k; ++s) {
            if (!sft_.transition(block_[pos - 1], s)) continue;
            block_[pos] = s;
            push_factor(pos);
            if (pos == big_l_ - 1)
                emit_leaf(pos);
            else
                extend(pos + 1);
        }
    }
};

struct BlockPlan {
    int prefix_depth = 0;                       // 0 => single serial block
    std::vector<std::vector<int>> prefixes;     // lexicographic
    std::vector<std::uint64_t> word_offset;     // per block, rank of first word
    std::vector<std::uint64_t> word_count;      // per block
};

BlockPlan plan_blocks(const CocycleSpec& c, int n, std::uint64_t budget) {
    const SubshiftSpec& sft = c.sft();
    bool saturated = false;
    const std::uint64_t words = sft.word_count(n, &saturated);
    if (saturated || words > budget)
        throw BudgetExceeded("cylinder sweep at n=" + std::to_string(n) + " needs " +
                             (saturated ? std::string("> 2^62") : std::to_string(words)) +
                             " words, budget " + std::to_string(budget));
    BlockPlan plan;
    int s = 0;
    if (words >= 512 && n >= 2) {
        s = 1;
        while (s < n - 1 && sft.word_count(s) < 256) ++s;
    }
    plan.prefix_depth = s;
    if (s == 0) {
        plan.prefixes.push_back({});
        plan.word_offset.push_back(0);
        plan.word_count.push_back(words);
        return plan;
    }
    std::uint64_t off = 0;
    for_each_word(sft, s, std::uint64_t{1} << 32, [&](const Word& p) {
        plan.prefixes.push_back(p.symbols);
        plan.word_offset.push_back(off);
        const std::uint64_t cnt = sft.suffix_count(p.last(), n - s + 1);
        plan.word_count.push_back(cnt);
        off += cnt;
    });
    return plan;
}

} // namespace

void sweep_cylinders(const CocycleSpec& c, int n, std::uint64_t budget,
                     const std::function<void(const CylinderView&)>& visitor) {
    plan_blocks(c, n, budget);   // budget validation
    BlockWalker walker(c, n);
    std::uint64_t index = 0;
    walker.run({}, [&](std::span<const int> word, std::span<const double> cands) {
        CylinderView view;
        view.index = index++;
        view.word = word;
        view.candidates = cands;
        view.d = c.dimension();
        visitor(view);
    });
}

void sweep_blocks(const CocycleSpec& c, int n, const SweepOptions& opts,
                  const std::function<void(std::size_t)>& prepare,
                  const std::function<void(std::size_t, const CylinderView&)>& leaf) {
    BlockPlan plan = plan_blocks(c, n, opts.budget);
    const std::size_t nb = plan.prefixes.size();
    prepare(nb);
    parallel_blocks(nb, opts.threads, [&](std::size_t b) {
        BlockWalker walker(c, n);
        std::uint64_t index = plan.word_offset[b];
        walker.run(plan.prefixes[b], [&](std::span<const int> word, std::span<const double> cands) {
            CylinderView view;
            view.index = index++;
            view.word = word;
            view.candidates = cands;
            view.d = c.dimension();
            leaf(b, view);
        });
    });
}

CylinderTable CylinderTable::build(const CocycleSpec& c, int n, const SweepOptions& opts) {
    BlockPlan plan = plan_blocks(c, n, opts.budget);
    CylinderTable table;
    table.n_ = n;
    table.d_ = c.dimension();
    table.one_step_ = c.one_step_cocycle();
    table.words_ = c.sft().word_count(n);
    const int d = table.d_;
    table.sigma_.assign(table.words_ * static_cast<std::size_t>(d), 0.0);

    if (!table.one_step_) {
        // candidate counts depend only on the word's last symbol
        table.offsets_.assign(table.words_ + 1, 0);
        const int w = c.window();
        std::vector<std::uint64_t> cand_offset(plan.prefixes.size(), 0);
        {
            // block-level candidate offsets: walk blocks in order
            std::uint64_t coff = 0;
            for (std::size_t b = 0; b < plan.prefixes.size(); ++b) {
                cand_offset[b] = coff;
                if (plan.prefix_depth == 0) {
                    coff += c.sft().word_count(c.determining_length(n));
                } else {
                    const int last = plan.prefixes[b].back();
                    coff += c.sft().suffix_count(last, c.determining_length(n) - plan.prefix_depth + 1);
                }
            }
            table.all_.assign(coff * static_cast<std::size_t>(d), 0.0);
        }
        parallel_blocks(plan.prefixes.size(), opts.threads, [&](std::size_t b) {
            BlockWalker walker(c, n);
            std::uint64_t windex = plan.word_offset[b];
            std::uint64_t coff = cand_offset[b];
            walker.run(plan.prefixes[b], [&](std::span<const int> word, std::span<const double> cands) {
                const int ncand = static_cast<int>(cands.size()) / d;
                table.offsets_[windex] = coff;
                std::copy(cands.begin(), cands.end(),
                          table.all_.begin() + static_cast<std::ptrdiff_t>(coff * d));
                // representative: candidate with the largest sigma_1
                int best = 0;
                for (int j = 1; j < ncand; ++j)
                    if (cands[static_cast<std::size_t>(j) * d] > cands[static_cast<std::size_t>(best) * d])
                        best = j;
                std::copy(cands.begin() + static_cast<std::ptrdiff_t>(best) * d,
                          cands.begin() + static_cast<std::ptrdiff_t>(best + 1) * d,
                          table.sigma_.begin() + static_cast<std::ptrdiff_t>(windex * d));
                coff += ncand;
                ++windex;
            });
        });
        table.offsets_[table.words_] = table.all_.size() / d;
    } else {
        parallel_blocks(plan.prefixes.size(), opts.threads, [&](std::size_t b) {
            BlockWalker walker(c, n);
            std::uint64_t windex = plan.word_offset[b];
            walker.run(plan.prefixes[b], [&](std::span<const int>, std::span<const double> cands) {
                std::copy(cands.begin(), cands.end(),
                          table.sigma_.begin() + static_cast<std::ptrdiff_t>(windex * d));
                ++windex;
            });
        });
    }
    return table;
}

std::span<const double> CylinderTable::representative(std::uint64_t i) const {
    return {sigma_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
}

std::span<const double> CylinderTable::candidates(std::uint64_t i) const {
    if (one_step_) return representative(i);
    const std::uint64_t lo = offsets_[i], hi = offsets_[i + 1];
    return {all_.data() + lo * static_cast<std::size_t>(d_),
            static_cast<std::size_t>((hi - lo) * d_)};
}

int CylinderTable::num_candidates(std::uint64_t i) const {
    if (one_step_) return 1;
    return static_cast<int>(offsets_[i + 1] - offsets_[i]);
}

void CylinderTable::word_values(std::span<const double> q, std::vector<double>& out) const {
    out.resize(words_);
    const int d = d_;
    if (one_step_) {
        for (std::uint64_t i = 0; i < words_; ++i) {
            const double* v = sigma_.data() + i * static_cast<std::size_t>(d);
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += q[j] * v[j];
            out[i] = acc;
        }
        return;
    }
    for (std::uint64_t i = 0; i < words_; ++i) {
        const std::uint64_t lo = offsets_[i], hi = offsets_[i + 1];
        double best = kNegInf;
        for (std::uint64_t cands = lo; cands < hi; ++cands) {
            const double* v = all_.data() + cands * static_cast<std::size_t>(d);
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += q[j] * v[j];
            best = std::max(best, acc);
        }
        out[i] = best;
    }
}

double CylinderTable::log_partition(std::span<const double> q) const {
    std::vector<double> vals;
    word_values(q, vals);
    return log_sum_exp(vals);
}

} // namespace lyapress
