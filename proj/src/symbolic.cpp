#include "lyapress/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lyapress/errors.hpp"

namespace lyapress {

namespace {
constexpr std::uint64_t kCountCap = std::uint64_t{1} << 62;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b, bool* sat) {
    if (a >= kCountCap || b >= kCountCap || a + b >= kCountCap) {
        if (sat) *sat = true;
        return kCountCap;
    }
    return a + b;
}
} // namespace

std::string Word::to_string() const {
    std::ostringstream os;
    bool wide = false;
    for (int s : symbols)
        if (s > 9) wide = true;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (wide && i > 0) os << ',';
        os << symbols[i];
    }
    return os.str();
}

Word Word::parse(const std::string& text, int alphabet_size) {
    std::vector<int> syms;
    if (alphabet_size > 10 || text.find(',') != std::string::npos) {
        std::istringstream is(text);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (tok.empty()) throw ParseError("empty symbol in word '" + text + "'");
            syms.push_back(std::stoi(tok));
        }
    } else {
        for (char c : text) {
            if (c < '0' || c > '9') throw ParseError("bad symbol character in word '" + text + "'");
            syms.push_back(c - '0');
        }
    }
    if (syms.empty()) throw ParseError("empty word");
    for (int s : syms)
        if (s < 0 || s >= alphabet_size)
            throw ParseError("symbol out of range in word '" + text + "'");
    return Word(std::move(syms));
}

SubshiftSpec::SubshiftSpec(int alphabet_size, std::vector<std::vector<int>> transitions)
    : k_(alphabet_size), rows_(std::move(transitions)) {
    if (k_ <= 0) throw ValidationError("alphabet_size must be positive");
    if (static_cast<int>(rows_.size()) != k_)
        throw ValidationError("transition matrix must have alphabet_size rows");
    q_.assign(static_cast<std::size_t>(k_) * k_, 0);
    std::vector<int> row_sum(k_, 0), col_sum(k_, 0);
    for (int a = 0; a < k_; ++a) {
        if (static_cast<int>(rows_[a].size()) != k_)
            throw ValidationError("transition matrix must be square");
        for (int b = 0; b < k_; ++b) {
            const int v = rows_[a][b];
            if (v != 0 && v != 1) throw ValidationError("transition entries must be 0 or 1");
            q_[static_cast<std::size_t>(a) * k_ + b] = v;
            row_sum[a] += v;
            col_sum[b] += v;
        }
    }
    for (int a = 0; a < k_; ++a) {
        if (row_sum[a] == 0) throw ValidationError("transition row " + std::to_string(a) + " is zero");
        if (col_sum[a] == 0) throw ValidationError("transition column " + std::to_string(a) + " is zero");
    }

    // Primitivity via boolean powers up to the Wielandt bound (k-1)^2 + 1.
    const int bound = (k_ - 1) * (k_ - 1) + 1;
    std::vector<char> p(q_.begin(), q_.end());
    auto all_positive = [&](const std::vector<char>& m) {
        return std::all_of(m.begin(), m.end(), [](char c) { return c != 0; });
    };
    primitive_ = all_positive(p);
    std::vector<char> tmp(p.size());
    for (int step = 1; step < bound && !primitive_; ++step) {
        for (int a = 0; a < k_; ++a)
            for (int b = 0; b < k_; ++b) {
                char acc = 0;
                for (int c = 0; c < k_ && !acc; ++c)
                    acc = static_cast<char>(p[static_cast<std::size_t>(a) * k_ + c] &&
                                            q_[static_cast<std::size_t>(c) * k_ + b]);
                tmp[static_cast<std::size_t>(a) * k_ + b] = acc;
            }
        p.swap(tmp);
        primitive_ = all_positive(p);
    }
    suffix_counts_.push_back({});                       // length 0 unused
    suffix_counts_.push_back(std::vector<std::uint64_t>(k_, 1));  // length 1
}

SubshiftSpec SubshiftSpec::full_shift(int alphabet_size) {
    std::vector<std::vector<int>> rows(alphabet_size, std::vector<int>(alphabet_size, 1));
    return SubshiftSpec(alphabet_size, std::move(rows));
}

void SubshiftSpec::ensure_counts(int len) const {
    while (static_cast<int>(suffix_counts_.size()) <= len) {
        const auto& prev = suffix_counts_.back();
        std::vector<std::uint64_t> cur(k_, 0);
        for (int a = 0; a < k_; ++a) {
            std::uint64_t acc = 0;
            for (int b = 0; b < k_; ++b)
                if (transition(a, b)) acc = sat_add(acc, prev[b], &count_saturated_);
            cur[a] = acc;
        }
        suffix_counts_.push_back(std::move(cur));
    }
}

std::uint64_t SubshiftSpec::suffix_count(int a, int len, bool* saturated) const {
    if (len <= 0) return 1;
    ensure_counts(len);
    if (saturated) *saturated = count_saturated_;
    return suffix_counts_[len][a];
}

std::uint64_t SubshiftSpec::word_count(int n, bool* saturated) const {
    if (n < 1) throw ValidationError("word length must be >= 1");
    ensure_counts(n);
    bool sat = false;
    std::uint64_t acc = 0;
    for (int a = 0; a < k_; ++a) acc = sat_add(acc, suffix_counts_[n][a], &sat);
    sat = sat || count_saturated_;
    if (saturated) *saturated = sat;
    return acc;
}

bool SubshiftSpec::word_admissible(std::span<const int> symbols) const {
    if (symbols.empty()) return false;
    for (int s : symbols)
        if (s < 0 || s >= k_) return false;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
        if (!transition(symbols[i], symbols[i + 1])) return false;
    return true;
}

WordEnumerator::WordEnumerator(const SubshiftSpec& sft, int n, std::uint64_t budget)
    : sft_(sft), n_(n), warn_(!sft.is_primitive()) {
    if (n < 1) throw ValidationError("word length must be >= 1");
    bool sat = false;
    total_ = sft.word_count(n, &sat);
    if (sat || total_ > budget)
        throw BudgetExceeded("word count " + (sat ? std::string("(saturated)") : std::to_string(total_)) +
                             " exceeds budget " + std::to_string(budget) + " at n=" + std::to_string(n));
}

bool WordEnumerator::advance() {
    // lexicographic successor with admissibility backtracking
    int pos = n_ - 1;
    while (pos >= 0) {
        int s = cur_[pos] + 1;
        while (s < sft_.alphabet_size()) {
            if (pos == 0 || sft_.transition(cur_[pos - 1], s)) break;
            ++s;
        }
        if (s < sft_.alphabet_size()) {
            cur_[pos] = s;
            // fill the tail with smallest admissible continuations
            for (int i = pos + 1; i < n_; ++i) {
                int t = 0;
                while (t < sft_.alphabet_size() && !sft_.transition(cur_[i - 1], t)) ++t;
                if (t == sft_.alphabet_size()) return false;  // unreachable: no dead rows
                cur_[i] = t;
            }
            return true;
        }
        --pos;
    }
    return false;
}

bool WordEnumerator::next(Word& out) {
    if (done_) return false;
    if (!started_) {
        started_ = true;
        cur_.assign(n_, 0);
        for (int i = 0; i < n_; ++i) {
            int t = 0;
            while (t < sft_.alphabet_size() &&
                   (i > 0 ? !sft_.transition(cur_[i - 1], t) : false))
                ++t;
            cur_[i] = (i == 0) ? 0 : t;
        }
    } else if (!advance()) {
        done_ = true;
        return false;
    }
    out.symbols = cur_;
    return true;
}

void for_each_word(const SubshiftSpec& sft, int n, std::uint64_t budget,
                   const std::function<void(const Word&)>& fn) {
    WordEnumerator en(sft, n, budget);
    Word w;
    while (en.next(w)) fn(w);
}

std::uint64_t word_rank(const SubshiftSpec& sft, std::span<const int> symbols) {
    const int n = static_cast<int>(symbols.size());
    std::uint64_t rank = 0;
    for (int i = 0; i < n; ++i) {
        for (int s = 0; s < symbols[i]; ++s) {
            if (i > 0 && !sft.transition(symbols[i - 1], s)) continue;
            rank += sft.suffix_count(s, n - i);
        }
    }
    return rank;
}

SymbolicPoint::SymbolicPoint(std::vector<int> left_period, std::vector<int> core,
                             std::vector<int> right_period, long core_start)
    : left_(std::move(left_period)), core_(std::move(core)),
      right_(std::move(right_period)), core_start_(core_start) {
    if (left_.empty() || right_.empty())
        throw ValidationError("periodic tails must be nonempty");
}

SymbolicPoint SymbolicPoint::periodic(const PeriodicPointSym& p) {
    if (p.repeating_word.empty()) throw ValidationError("periodic word must be nonempty");
    return SymbolicPoint(p.repeating_word.symbols, {}, p.repeating_word.symbols, 0);
}

SymbolicPoint SymbolicPoint::homoclinic(const HomoclinicPointSym& z) {
    const auto& pw = z.base.repeating_word.symbols;
    if (pw.empty()) throw ValidationError("periodic word must be nonempty");
    if (z.entry_time < 1) throw ValidationError("entry_time must be >= 1");
    if (static_cast<int>(z.excursion.symbols.size()) != z.entry_time - 1)
        throw ValidationError("excursion must have length entry_time - 1");
    // Core covers coordinates 0..entry_time-1: the base symbol p_0 followed
    // by the excursion.  Left tail phase: coordinate -1 must carry the last
    // symbol of the repeating word, which the repeating block does.
    std::vector<int> core;
    core.push_back(pw[0]);
    core.insert(core.end(), z.excursion.symbols.begin(), z.excursion.symbols.end());
    // Right tail must start (phase 0) at coordinate entry_time.  The core
    // ends exactly there, so the plain repeating block works.
    SymbolicPoint out(pw, std::move(core), pw, 0);
    if (out.equals(SymbolicPoint::periodic(z.base)))
        throw ValidationError("homoclinic point equals its base periodic point");
    return out;
}

int SymbolicPoint::at(long i) const {
    const long end = core_end();
    if (i >= core_start_ && i < end)
        return core_[static_cast<std::size_t>(i - core_start_)];
    if (i >= end) {
        const long off = (i - end) % static_cast<long>(right_.size());
        return right_[static_cast<std::size_t>(off)];
    }
    // left of the core: coordinate core_start_-1 carries the last symbol of
    // the left period, and so on leftwards
    const long p = static_cast<long>(left_.size());
    long off = (core_start_ - 1 - i) % p;             // 0 => last symbol
    return left_[static_cast<std::size_t>(p - 1 - off)];
}

SymbolicPoint SymbolicPoint::shifted(long m) const {
    SymbolicPoint out = *this;
    out.core_start_ -= m;
    return out;
}

bool SymbolicPoint::admissible(const SubshiftSpec& sft) const {
    const long lo = core_start_ - static_cast<long>(left_.size()) - 1;
    const long hi = core_end() + static_cast<long>(right_.size()) + 1;
    for (long i = lo; i < hi; ++i)
        if (!sft.transition(at(i), at(i + 1))) return false;
    return true;
}

long SymbolicPoint::comparison_horizon(const SymbolicPoint& other) const {
    const long core_extent =
        std::max({std::labs(core_start_), std::labs(core_end()),
                  std::labs(other.core_start_), std::labs(other.core_end())});
    const long periods =
        static_cast<long>(left_.size()) * static_cast<long>(other.left_.size()) +
        static_cast<long>(right_.size()) * static_cast<long>(other.right_.size());
    return core_extent + periods + 2;
}

bool SymbolicPoint::equals(const SymbolicPoint& other) const {
    const long h = comparison_horizon(other);
    for (long i = -h; i <= h; ++i)
        if (at(i) != other.at(i)) return false;
    return true;
}

bool SymbolicPoint::agrees_forward(const SymbolicPoint& other, long from) const {
    const long h = comparison_horizon(other);
    const long lap = static_cast<long>(right_.size()) * static_cast<long>(other.right_.size());
    const long hi = std::max(from, h) + lap + 1;
    for (long i = from; i <= hi; ++i)
        if (at(i) != other.at(i)) return false;
    return true;
}

bool SymbolicPoint::agrees_backward(const SymbolicPoint& other, long upto) const {
    const long h = comparison_horizon(other);
    const long lap = static_cast<long>(left_.size()) * static_cast<long>(other.left_.size());
    const long lo = std::min(upto, -h) - lap - 1;
    for (long i = upto; i >= lo; --i)
        if (at(i) != other.at(i)) return false;
    return true;
}

double symbolic_distance(const SymbolicPoint& x, const SymbolicPoint& y) {
    if (x.equals(y)) return 0.0;
    long m = 0;
    for (;;) {
        if (x.at(m) != y.at(m) || x.at(-m) != y.at(-m))
            return std::pow(2.0, -static_cast<double>(m));
        ++m;
    }
}

bool concat_admissible(const SubshiftSpec& sft, const Word& i, const Word& j) {
    if (i.empty() || j.empty()) return false;
    return sft.transition(i.last(), j.first());
}

} // namespace lyapress
