#include "lyapress/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lyapress/errors.hpp"

namespace lyapress {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON in '") + path + "': " + e.what());
    }
    return j;
}

void save_json(const Json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

namespace {

const Json& need(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
    return *it;
}

Matrix matrix_from_json(const Json& j, int d, const std::string& what) {
    if (!j.is_array() || static_cast<int>(j.size()) != d)
        throw ParseError(what + ": expected " + std::to_string(d) + " rows");
    Matrix m(d, d);
    for (int r = 0; r < d; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != d)
            throw ParseError(what + ": row " + std::to_string(r) + " needs " +
                             std::to_string(d) + " entries");
        for (int col = 0; col < d; ++col) {
            if (!row[col].is_number())
                throw ParseError(what + ": non-numeric entry");
            m(r, col) = row[col].get<double>();
        }
    }
    return m;
}

std::string word_key(const Word& w, int k) {
    std::ostringstream os;
    for (std::size_t i = 0; i < w.symbols.size(); ++i) {
        if (k > 10 && i > 0) os << ',';
        os << w.symbols[i];
    }
    return os.str();
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

CocycleSpec cocycle_from_json(const Json& j) {
    const int k = need(j, "alphabet_size").get<int>();
    const auto& tj = need(j, "transitions");
    if (!tj.is_array() || static_cast<int>(tj.size()) != k)
        throw ParseError("transitions: expected " + std::to_string(k) + " rows");
    std::vector<std::vector<int>> rows(k, std::vector<int>(k, 0));
    for (int a = 0; a < k; ++a) {
        if (static_cast<int>(tj[a].size()) != k)
            throw ParseError("transitions: row " + std::to_string(a) + " has wrong length");
        for (int b = 0; b < k; ++b) rows[a][b] = tj[a][b].get<int>();
    }
    SubshiftSpec sft(k, std::move(rows));

    const int d = need(j, "dimension").get<int>();
    const int w = need(j, "window").get<int>();
    const double alpha = need(j, "holder_alpha").get<double>();
    const int anchor = j.contains("window_anchor") ? j["window_anchor"].get<int>() : 0;

    std::uint64_t slots = 1;
    for (int i = 0; i < w; ++i) slots *= static_cast<std::uint64_t>(k);
    std::vector<Matrix> gens(slots);
    const auto& gj = need(j, "generators");
    if (!gj.is_object()) throw ParseError("generators must be an object");
    for (auto it = gj.begin(); it != gj.end(); ++it) {
        const Word word = Word::parse(it.key(), k);
        if (word.length() != w)
            throw ValidationError("generator key '" + it.key() + "' has length " +
                                  std::to_string(word.length()) + ", window is " +
                                  std::to_string(w));
        if (!sft.word_admissible(word.symbols))
            throw ValidationError("generator key '" + it.key() + "' is not admissible");
        std::uint64_t code = 0;
        for (int s : word.symbols) code = code * k + static_cast<std::uint64_t>(s);
        gens[code] = matrix_from_json(it.value(), d, "generator '" + it.key() + "'");
    }
    // every admissible window needs a generator
    for_each_word(sft, w, std::uint64_t{1} << 24, [&](const Word& word) {
        std::uint64_t code = 0;
        for (int s : word.symbols) code = code * k + static_cast<std::uint64_t>(s);
        if (gens[code].size() == 0)
            throw ValidationError("missing generator for admissible window '" +
                                  word.to_string() + "'");
    });
    return CocycleSpec(std::move(sft), d, w, alpha, std::move(gens), anchor);
}

Json cocycle_to_json(const CocycleSpec& c) {
    Json j;
    j["alphabet_size"] = c.sft().alphabet_size();
    Json rows = Json::array();
    for (int a = 0; a < c.sft().alphabet_size(); ++a) {
        Json row = Json::array();
        for (int b = 0; b < c.sft().alphabet_size(); ++b)
            row.push_back(c.sft().transition(a, b) ? 1 : 0);
        rows.push_back(row);
    }
    j["transitions"] = rows;
    j["dimension"] = c.dimension();
    j["window"] = c.window();
    j["holder_alpha"] = c.holder_alpha();
    j["window_anchor"] = c.window_anchor();
    Json gens;
    for (const auto& [word, m] : c.generators())
        gens[word_key(word, c.sft().alphabet_size())] = matrix_to_json(m);
    j["generators"] = std::move(gens);
    return j;
}

CocycleSpec load_cocycle_spec(const std::string& path) {
    return cocycle_from_json(load_json(path));
}

Json pressure_to_json(const PressureEstimate& e) {
    Json j;
    j["q"] = e.q;
    j["n_max"] = e.n_max;
    j["point_estimate"] = e.point_estimate;
    Json vals = Json::array();
    for (const auto& [n, v] : e.values) vals.push_back({{"n", n}, {"value", v}});
    j["values"] = vals;
    if (e.superadditive_lower) j["superadditive_lower"] = *e.superadditive_lower;
    if (e.gap_k) j["gap_k"] = *e.gap_k;
    if (e.qm_constant_log) j["qm_constant_log"] = *e.qm_constant_log;
    if (e.aitken) j["aitken_diagnostic"] = *e.aitken;
    j["values_nonincreasing"] = e.values_nonincreasing;
    j["max_uptick"] = e.max_uptick;
    if (e.crosscheck) {
        j["crosscheck"] = {{"kind", e.crosscheck->kind},
                           {"limit_value", e.crosscheck->limit_value},
                           {"finite_n_value", e.crosscheck->finite_n_value},
                           {"finite_n_difference", e.crosscheck->finite_n_difference}};
    }
    return j;
}

Json verdict_to_json(const StructureVerdict& v) {
    Json j;
    j["kind"] = to_string(v.kind);
    if (v.index >= 0) j["index"] = v.index;
    j["verdict"] = to_string(v.verdict);
    j["margin"] = v.margin;
    j["witness"] = v.witness;
    return j;
}

Json markov_to_json(const MarkovMeasure& m) {
    Json j;
    j["stochastic"] = matrix_to_json(m.transition());
    Json pi = Json::array();
    for (int i = 0; i < m.stationary().size(); ++i) pi.push_back(m.stationary()(i));
    j["stationary"] = pi;
    return j;
}

MarkovMeasure markov_from_json(const SubshiftSpec& sft, const Json& j) {
    const int k = sft.alphabet_size();
    Matrix p = matrix_from_json(need(j, "stochastic"), k, "stochastic");
    return MarkovMeasure(sft, std::move(p));
}

Json induced_to_json(const InducedCocycle& ic) {
    Json j = cocycle_to_json(ic.as_cocycle());
    Json letters = Json::array();
    for (const auto& l : ic.letters)
        letters.push_back({{"core", word_key(l.core, ic.base_alphabet)},
                           {"word", word_key(l.full, ic.base_alphabet)},
                           {"m1", l.m1},
                           {"m2", l.m2}});
    Json centers = Json::array();
    for (const auto& c : ic.cone.centers) {
        Json v = Json::array();
        for (int i = 0; i < c.size(); ++i) v.push_back(c(i));
        centers.push_back(v);
    }
    j["induced"] = {{"core_n", ic.core_n},
                    {"K0", ic.k0},
                    {"base_alphabet_size", ic.base_alphabet},
                    {"cone", {{"tau1", ic.cone.tau1}, {"tau2", ic.cone.tau2},
                              {"centers", centers}}},
                    {"letters", letters}};
    return j;
}

InducedCocycle induced_from_json(const Json& j, const ConeCheckOptions& cone_opts) {
    const CocycleSpec c = cocycle_from_json(j);
    const auto& ij = need(j, "induced");
    InducedCocycle ic;
    ic.core_n = need(ij, "core_n").get<int>();
    ic.k0 = need(ij, "K0").get<int>();
    ic.base_alphabet = need(ij, "base_alphabet_size").get<int>();
    const auto& cj = need(ij, "cone");
    ic.cone.tau1 = need(cj, "tau1").get<double>();
    ic.cone.tau2 = need(cj, "tau2").get<double>();
    for (const auto& vc : need(cj, "centers")) {
        Vector v(vc.size());
        for (std::size_t i = 0; i < vc.size(); ++i) v(static_cast<int>(i)) = vc[i].get<double>();
        ic.cone.centers.push_back(v);
    }
    const auto& letters = need(ij, "letters");
    // The words below live over the UNDERLYING subshift's alphabet; the
    // letter matrices are this spec's one-step generators.
    const int base_k = ic.base_alphabet;
    std::size_t idx = 0;
    for (const auto& lj : letters) {
        InducedLetter l;
        l.core = Word::parse(need(lj, "core").get<std::string>(), base_k);
        l.full = Word::parse(need(lj, "word").get<std::string>(), base_k);
        l.m1 = need(lj, "m1").get<int>();
        l.m2 = need(lj, "m2").get<int>();
        const std::vector<int> sym{static_cast<int>(idx)};
        l.loop_matrix = c.generator(sym);
        ic.letters.push_back(std::move(l));
        ++idx;
    }
    ic.verify_cones(cone_opts);   // hard invariant re-verified on load
    return ic;
}

std::string spectrum_csv(const std::vector<SpectrumPoint>& points, int d) {
    std::ostringstream os;
    for (int i = 1; i <= d; ++i) os << "alpha_" << i << ",";
    os << "entropy,method,n,";
    for (int i = 1; i <= d; ++i) os << "q_star_" << i << ",";
    os << "flags\n";
    for (const auto& p : points) {
        for (int i = 0; i < d; ++i) os << format_double(p.alpha(i)) << ",";
        if (p.entropy)
            os << format_double(*p.entropy);
        else
            os << "-inf";
        os << "," << to_string(p.method) << "," << p.n << ",";
        for (int i = 0; i < d; ++i) {
            if (p.q_star) os << format_double((*p.q_star)(i));
            os << ",";
        }
        std::string flags;
        if (p.boundary_hit) flags += "boundary-hit;";
        if (p.boundary_target) flags += "boundary-target;";
        if (p.empty_level_set) flags += "empty;";
        os << flags << "\n";
        if (p.measure_lower) {
            for (int i = 0; i < d; ++i) os << format_double(p.alpha(i)) << ",";
            os << format_double(*p.measure_lower) << ",measure-sup," << p.n << ",";
            for (int i = 0; i < d; ++i) os << ",";
            os << "chi-gap=" << format_double(p.measure_chi_gap.value_or(0.0)) << ";\n";
        }
    }
    return os.str();
}

std::string comparison_csv(const std::vector<PressureComparisonRow>& rows) {
    std::ostringstream os;
    os << "n,induced_over_n,direct_at_n,difference,k_used,alphabet_size\n";
    for (const auto& r : rows)
        os << r.n << "," << format_double(r.induced_over_n) << ","
           << format_double(r.direct_at_n) << "," << format_double(r.difference) << ","
           << r.k_used << "," << r.alphabet_size << "\n";
    return os.str();
}

} // namespace lyapress
