#ifndef LYAPRESS_SYMBOLIC_HPP
#define LYAPRESS_SYMBOLIC_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lyapress {

/// Finite admissible word over the alphabet {0..k-1}.
struct Word {
    std::vector<int> symbols;

    Word() = default;
    explicit Word(std::vector<int> s) : symbols(std::move(s)) {}

    int length() const { return static_cast<int>(symbols.size()); }
    bool empty() const { return symbols.empty(); }
    int first() const { return symbols.front(); }
    int last() const { return symbols.back(); }

    bool operator==(const Word& o) const { return symbols == o.symbols; }
    bool operator<(const Word& o) const { return symbols < o.symbols; }

    std::string to_string() const;          // "0110" for k <= 10, else "0,1,1,0"
    static Word parse(const std::string& text, int alphabet_size);
};

/// Subshift of finite type over {0..k-1} given by a 0/1 transition matrix Q.
/// A transition a -> b is allowed when Q[a][b] == 1.  Rows and columns must
/// all be nonzero (no dead symbols).  Primitivity is computed once and
/// cached; pressure/spectrum entry points require it, symbolic operations do
/// not.
class SubshiftSpec {
public:
    SubshiftSpec(int alphabet_size, std::vector<std::vector<int>> transitions);

    static SubshiftSpec full_shift(int alphabet_size);

    int alphabet_size() const { return k_; }
    bool transition(int a, int b) const { return q_[static_cast<std::size_t>(a) * k_ + b] != 0; }
    const std::vector<std::vector<int>>& transition_rows() const { return rows_; }

    bool is_primitive() const { return primitive_; }

    /// Number of admissible words of length n (sum of entries of Q^{n-1}).
    /// Saturates at 2^62; `saturated` is set when the true count overflows.
    std::uint64_t word_count(int n, bool* saturated = nullptr) const;

    /// Count of admissible words of length `len` starting with symbol `a`.
    std::uint64_t suffix_count(int a, int len, bool* saturated = nullptr) const;

    bool word_admissible(std::span<const int> symbols) const;

private:
    int k_;
    std::vector<std::vector<int>> rows_;
    std::vector<int> q_;                       // flattened k x k
    bool primitive_ = false;
    // suffix_counts_[len][a]: admissible words of length len starting at a,
    // grown lazily and cached (saturating arithmetic).
    mutable std::vector<std::vector<std::uint64_t>> suffix_counts_;
    mutable bool count_saturated_ = false;

    void ensure_counts(int len) const;
};

/// Streams the admissible words of length n in lexicographic order.
/// Throws BudgetExceeded up front when the word count exceeds `budget`.
/// `not_primitive_warning()` is set instead of failing for non-mixing Q.
class WordEnumerator {
public:
    WordEnumerator(const SubshiftSpec& sft, int n, std::uint64_t budget);

    bool next(Word& out);
    bool not_primitive_warning() const { return warn_; }
    std::uint64_t total() const { return total_; }

private:
    const SubshiftSpec& sft_;
    int n_;
    bool warn_;
    bool done_ = false;
    bool started_ = false;
    std::uint64_t total_;
    std::vector<int> cur_;

    bool advance();
};

void for_each_word(const SubshiftSpec& sft, int n, std::uint64_t budget,
                   const std::function<void(const Word&)>& fn);

/// Periodic point given by its repeating word; the bi-infinite repetition
/// must be admissible (including the wrap transition last -> first).
struct PeriodicPointSym {
    Word repeating_word;
    int period() const { return repeating_word.length(); }
};

/// Homoclinic point of `base`: agrees with the periodic point on all
/// coordinates <= 0, runs through `excursion` on coordinates 1..entry_time-1
/// and re-enters the periodic tail from coordinate entry_time on.  Must
/// differ from the periodic point itself.
struct HomoclinicPointSym {
    PeriodicPointSym base;
    Word excursion;                // occupies coordinates 1..entry_time-1
    int entry_time = 1;            // T^{entry_time}(z) lies on W^s_loc(p)
};

/// Eventually periodic two-sided point: a finite core flanked by periodic
/// tails.  This class of points is closed under the shift and suffices for
/// every construction in scope; all symbol queries are exact.
class SymbolicPoint {
public:
    /// left tail ...LLL | core (starting at coordinate core_start) | RRR...
    SymbolicPoint(std::vector<int> left_period, std::vector<int> core,
                  std::vector<int> right_period, long core_start);

    static SymbolicPoint periodic(const PeriodicPointSym& p);
    /// Point z of the homoclinic description: z_i = p_i for i <= 0,
    /// excursion on 1..entry-1, p-tail (phase 0 at coordinate entry) beyond.
    static SymbolicPoint homoclinic(const HomoclinicPointSym& z);

    int at(long i) const;
    SymbolicPoint shifted(long m) const;   // T^m x, coordinates (T^m x)_i = x_{i+m}

    long core_start() const { return core_start_; }
    long core_end() const { return core_start_ + static_cast<long>(core_.size()); }
    int left_period_length() const { return static_cast<int>(left_.size()); }
    int right_period_length() const { return static_cast<int>(right_.size()); }

    bool admissible(const SubshiftSpec& sft) const;
    bool equals(const SymbolicPoint& other) const;
    /// True when x_i == y_i for all i >= from.
    bool agrees_forward(const SymbolicPoint& other, long from) const;
    /// True when x_i == y_i for all i <= upto.
    bool agrees_backward(const SymbolicPoint& other, long upto) const;

private:
    std::vector<int> left_, core_, right_;
    long core_start_;

    long comparison_horizon(const SymbolicPoint& other) const;
};

/// 2^{-m} with m = inf{ k >= 0 : x_i != y_i for some |i| <= k }; 0 iff equal.
double symbolic_distance(const SymbolicPoint& x, const SymbolicPoint& y);

/// True iff the word IJ is admissible given I and J are (checks the joint).
bool concat_admissible(const SubshiftSpec& sft, const Word& i, const Word& j);

/// Lexicographic rank of `symbols` within the admissible words of its length.
std::uint64_t word_rank(const SubshiftSpec& sft, std::span<const int> symbols);

} // namespace lyapress

#endif
