// lyapress: thermodynamic formalism of matrix cocycles over subshifts of
// finite type.  Subcommands: pressure, spectrum, oracle, check, induce,
// measures.  Data goes to files, diagnostics to stderr; exit code 0 on
// success (a fail verdict is a successful run), 2 on invariant violations,
// 3 on budget exhaustion.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lyapress/errors.hpp"
#include "lyapress/io.hpp"
#include "lyapress/parallel.hpp"
#include "lyapress/rng.hpp"

namespace {

using namespace lyapress;

constexpr const char* kVersion = "lyapress 0.1.0 (schema 1)";

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

struct GlobalConfig {
    std::string spec_path;
    std::string out_path;
    int threads = 0;
    std::uint64_t seed = 1;
    std::uint64_t budget = std::uint64_t{1} << 22;
};

std::uint64_t env_budget_default() {
    if (const char* env = std::getenv("LYAPRESS_BUDGET")) {
        const long long v = std::atoll(env);
        if (v > 0) return static_cast<std::uint64_t>(v);
    }
    return std::uint64_t{1} << 22;
}

PeriodicPointSym parse_periodic(const std::string& word_text, const SubshiftSpec& sft) {
    PeriodicPointSym p{Word::parse(word_text, sft.alphabet_size())};
    if (!SymbolicPoint::periodic(p).admissible(sft))
        throw ValidationError("periodic word '" + word_text + "' is not admissible");
    return p;
}

HomoclinicPointSym parse_homoclinic(const PeriodicPointSym& p, const std::string& excursion,
                                    int entry, const SubshiftSpec& sft) {
    HomoclinicPointSym z;
    z.base = p;
    z.entry_time = entry;
    if (!excursion.empty()) z.excursion = Word::parse(excursion, sft.alphabet_size());
    if (!SymbolicPoint::homoclinic(z).admissible(sft))
        throw ValidationError("homoclinic excursion is not admissible");
    return z;
}

int run_pressure(const GlobalConfig& g, const std::string& q_text, int n_max) {
    const CocycleSpec c = load_cocycle_spec(g.spec_path);
    const auto qv = parse_doubles(q_text);
    if (static_cast<int>(qv.size()) != c.dimension())
        throw ValidationError("q needs " + std::to_string(c.dimension()) + " entries");
    ExponentVector q{Eigen::Map<const Vector>(qv.data(), qv.size())};
    PressureOptions opts;
    opts.budget = g.budget;
    opts.threads = g.threads;
    const PressureEstimate est = estimate_pressure(c, q, n_max, opts);
    save_json(pressure_to_json(est), g.out_path);
    return 0;
}

int run_spectrum(const GlobalConfig& g, const std::string& targets_path, int grid, int n_max,
                 double q_box, bool measure_bounds) {
    const CocycleSpec c = load_cocycle_spec(g.spec_path);
    SpectrumOptions opts;
    opts.budget = g.budget;
    opts.threads = g.threads;
    opts.seed = g.seed;
    opts.q_box = q_box;
    opts.attach_measure_bound = measure_bounds;

    std::vector<LyapunovTarget> targets;
    if (!targets_path.empty()) {
        std::ifstream in(targets_path);
        if (!in) throw ParseError("cannot open targets '" + targets_path + "'");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto vals = parse_doubles(line);
            if (static_cast<int>(vals.size()) != c.dimension())
                throw ParseError("target line needs " + std::to_string(c.dimension()) +
                                 " entries: " + line);
            targets.emplace_back(Eigen::Map<const Vector>(vals.data(), vals.size()));
        }
    } else {
        // auto-grid across the estimated domain (interior segment sampling)
        const SpectrumEstimate dom =
            estimate_spectrum_domain(c, n_max, SweepOptions{g.budget, g.threads});
        Vector lo = dom.hull_vertices.front(), hi = lo;
        for (const auto& v : dom.hull_vertices)
            for (int i = 0; i < v.size(); ++i) {
                lo(i) = std::min(lo(i), v(i));
                hi(i) = std::max(hi(i), v(i));
            }
        const Vector center = 0.5 * (lo + hi);
        for (int s = 1; s < grid; ++s) {
            const double t = static_cast<double>(s) / grid;
            Vector a = lo + t * (hi - lo);
            // decreasing coordinates toward the target shape
            std::sort(a.data(), a.data() + a.size(), std::greater<double>());
            Vector probe = center + 0.95 * (a - center);
            try {
                targets.emplace_back(probe);
            } catch (const ValidationError&) {
                continue;
            }
        }
    }
    const auto points = spectrum_curve(c, targets, n_max, opts);
    write_text(g.out_path, spectrum_csv(points, c.dimension()));
    return 0;
}

int run_oracle(const GlobalConfig& g, const std::string& alpha_text, double eps, int n) {
    const CocycleSpec c = load_cocycle_spec(g.spec_path);
    const auto av = parse_doubles(alpha_text);
    if (static_cast<int>(av.size()) != c.dimension())
        throw ValidationError("alpha needs " + std::to_string(c.dimension()) + " entries");
    LyapunovTarget alpha{Eigen::Map<const Vector>(av.data(), av.size())};
    SweepOptions opts{g.budget, g.threads};
    if (eps <= 0.0) eps = default_oracle_eps(estimate_spectrum_domain(c, n, opts), n);
    const SpectrumPoint point = level_set_entropy_oracle(c, alpha, n, eps, opts);
    Json j;
    j["alpha"] = std::vector<double>(av.begin(), av.end());
    j["eps"] = eps;
    j["n"] = n;
    if (point.entropy) {
        j["entropy"] = *point.entropy;
        j["empty"] = false;
    } else {
        j["entropy"] = nullptr;
        j["empty"] = true;
    }
    save_json(j, g.out_path);
    return 0;
}

int run_check(const GlobalConfig& g, const std::string& kind, int index, int n_max,
              const std::string& p_text, const std::string& z_text, int z_entry, int n_pairs,
              int k_max) {
    const CocycleSpec c = load_cocycle_spec(g.spec_path);
    StructureOptions opts;
    opts.budget = g.budget;
    opts.threads = g.threads;
    StructureVerdict v;
    if (kind == "fiber-bunching") {
        v = check_fiber_bunched(c);
    } else if (kind == "pinching") {
        v = check_pinching(c, parse_periodic(p_text, c.sft()), opts);
    } else if (kind == "twisting" || kind == "typical") {
        const PeriodicPointSym p = parse_periodic(p_text, c.sft());
        const HomoclinicPointSym z = parse_homoclinic(p, z_text, z_entry, c.sft());
        v = (kind == "twisting") ? check_twisting(c, p, z, index, opts)
                                 : check_typical(c, p, z, opts);
    } else if (kind == "qm") {
        v = probe_quasi_multiplicativity(c, n_pairs, k_max, opts);
    } else if (kind == "domination") {
        v = check_domination(c, index, n_max, opts);
    } else {
        throw ValidationError("unknown check kind '" + kind + "'");
    }
    save_json(verdict_to_json(v), g.out_path);
    return 0;
}

int run_induce(const GlobalConfig& g, const std::string& p_text, const std::string& z_text,
               int z_entry, const std::string& n_list_text, const std::string& q_text,
               double tau1, double tau2, int k0, const std::string& compare_out) {
    const CocycleSpec c = load_cocycle_spec(g.spec_path);
    const PeriodicPointSym p = parse_periodic(p_text, c.sft());
    const HomoclinicPointSym z = parse_homoclinic(p, z_text, z_entry, c.sft());
    DominatedOptions opts;
    opts.tau1 = tau1;
    opts.tau2 = tau2;
    opts.k0 = k0;
    opts.budget = g.budget;
    opts.threads = g.threads;

    const auto n_doubles = parse_doubles(n_list_text);
    std::vector<int> n_list;
    for (double v : n_doubles) n_list.push_back(static_cast<int>(v));
    if (n_list.empty()) throw ValidationError("need at least one n");

    const auto qv = parse_doubles(q_text);
    if (static_cast<int>(qv.size()) != c.dimension())
        throw ValidationError("q needs " + std::to_string(c.dimension()) + " entries");
    ExponentVector q{Eigen::Map<const Vector>(qv.data(), qv.size())};

    const InducedCocycle ic = build_induced(c, p, z, n_list.back(), opts);
    save_json(induced_to_json(ic), g.out_path);
    if (!compare_out.empty()) {
        const auto rows = pressure_comparison(c, p, z, q, n_list, opts);
        write_text(compare_out, comparison_csv(rows));
    }
    return 0;
}

int run_measures(const GlobalConfig& g, const std::string& q_text, int n, int sweeps,
                 int restarts) {
    const CocycleSpec c = load_cocycle_spec(g.spec_path);
    const auto qv = parse_doubles(q_text);
    if (static_cast<int>(qv.size()) != c.dimension())
        throw ValidationError("q needs " + std::to_string(c.dimension()) + " entries");
    ExponentVector q{Eigen::Map<const Vector>(qv.data(), qv.size())};

    Json j;
    LyapunovOptions lopts;
    lopts.budget = g.budget;
    lopts.threads = g.threads;
    lopts.seed = g.seed;

    // random (measure, q-perturbation) gap sweep: every gap must clear -1e-9
    Json sweep = Json::array();
    Rng rng(g.seed);
    const int k = c.sft().alphabet_size();
    for (int s = 0; s < sweeps; ++s) {
        Matrix p = Matrix::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            double total = 0.0;
            std::vector<double> w(k, 0.0);
            for (int jcol = 0; jcol < k; ++jcol)
                if (c.sft().transition(i, jcol)) {
                    w[jcol] = -std::log(std::max(rng.next_double(), 1e-300));
                    total += w[jcol];
                }
            for (int jcol = 0; jcol < k; ++jcol) p(i, jcol) = w[jcol] / total;
        }
        MarkovMeasure m(c.sft(), p);
        Vector qr = q.q;
        for (int i = 0; i < qr.size(); ++i) qr(i) += 2.0 * rng.next_double() - 1.0;
        const double gap = variational_gap(c, m, ExponentVector(qr), n, lopts);
        sweep.push_back({{"gap", gap}});
    }
    j["gap_sweep"] = sweep;

    MaximizeOptions mopts;
    mopts.restarts = restarts;
    mopts.seed = g.seed;
    mopts.budget = g.budget;
    mopts.threads = g.threads;
    const MaximizeResult best = maximize_variational(c, q, n, mopts);
    j["maximize"] = {{"objective", best.objective},
                     {"entropy_term", best.entropy_term},
                     {"exponent_term", best.exponent_term},
                     {"measure", markov_to_json(best.measure)}};
    const double gap = variational_gap(c, best.measure, q, n, lopts);
    j["maximize"]["gap_at_n"] = gap;
    save_json(j, g.out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermodynamic formalism of matrix cocycles over subshifts of finite type"};
    app.set_version_flag("--version", kVersion);

    GlobalConfig g;
    g.budget = env_budget_default();
    app.add_option("--spec", g.spec_path, "cocycle spec JSON")->required();
    app.add_option("--out", g.out_path, "output artifact path")->required();
    app.add_option("--threads", g.threads, "worker threads (0 = auto)");
    app.add_option("--seed", g.seed, "deterministic seed");
    app.add_option("--budget", g.budget, "word enumeration budget");
    app.require_subcommand(1);

    std::string q_text = "0";
    std::string alpha_text;
    std::string targets_path;
    std::string kind = "fiber-bunching";
    std::string p_text = "0";
    std::string z_text;
    std::string n_list_text = "4,6,8";
    std::string compare_out;
    int n_max = 10, n = 10, index = 1, z_entry = 2, grid = 9, n_pairs = 5, k_max = 2;
    int sweeps = 20, restarts = 20, k0 = 12;
    double eps = 0.0, q_box = 20.0, tau1 = 0.1, tau2 = 0.3;
    bool measure_bounds = false;

    auto* pressure_cmd = app.add_subcommand("pressure", "partition function / pressure estimate");
    pressure_cmd->add_option("--q", q_text, "exponent vector, comma separated");
    pressure_cmd->add_option("--n-max", n_max, "maximal depth");

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Legendre entropy spectrum CSV");
    spectrum_cmd->add_option("--targets", targets_path, "CSV of alpha targets");
    spectrum_cmd->add_option("--grid", grid, "auto-grid size when no targets file");
    spectrum_cmd->add_option("--n-max", n_max, "depth");
    spectrum_cmd->add_option("--q-box", q_box, "optimization box half-width");
    spectrum_cmd->add_flag("--measure-bounds", measure_bounds,
                           "attach measure-sup lower bounds");

    auto* oracle_cmd = app.add_subcommand("oracle", "level-set counting oracle");
    oracle_cmd->add_option("--alpha", alpha_text, "target vector")->required();
    oracle_cmd->add_option("--eps", eps, "level-set tolerance (0 = auto)");
    oracle_cmd->add_option("--n", n, "depth");

    auto* check_cmd = app.add_subcommand("check", "structural checks");
    check_cmd->add_option("--kind", kind,
                          "fiber-bunching|pinching|twisting|typical|qm|domination");
    check_cmd->add_option("--index", index, "domination index / twisting level");
    check_cmd->add_option("--n-max", n_max, "fit depth for domination");
    check_cmd->add_option("--p", p_text, "periodic word");
    check_cmd->add_option("--z-excursion", z_text, "homoclinic excursion word");
    check_cmd->add_option("--z-entry", z_entry, "homoclinic entry time");
    check_cmd->add_option("--n-pairs", n_pairs, "qm probe pair length");
    check_cmd->add_option("--k-max", k_max, "qm probe connector cap");

    auto* induce_cmd = app.add_subcommand("induce", "build the induced dominated subsystem");
    induce_cmd->add_option("--p", p_text, "periodic word");
    induce_cmd->add_option("--z-excursion", z_text, "homoclinic excursion word");
    induce_cmd->add_option("--z-entry", z_entry, "homoclinic entry time");
    induce_cmd->add_option("--n-list", n_list_text, "depths for the comparison table");
    induce_cmd->add_option("--q", q_text, "exponent vector for the comparison");
    induce_cmd->add_option("--tau1", tau1, "source cone radius");
    induce_cmd->add_option("--tau2", tau2, "target cone radius");
    induce_cmd->add_option("--k0", k0, "connector search budget");
    induce_cmd->add_option("--compare-out", compare_out, "comparison table CSV path");

    auto* measures_cmd = app.add_subcommand("measures", "variational gap sweeps + maximization");
    measures_cmd->add_option("--q", q_text, "exponent vector");
    measures_cmd->add_option("--n", n, "cylinder depth");
    measures_cmd->add_option("--sweeps", sweeps, "random (measure, q) pairs");
    measures_cmd->add_option("--restarts", restarts, "optimizer restarts");

    CLI11_PARSE(app, argc, argv);

    try {
        if (pressure_cmd->parsed()) return run_pressure(g, q_text, n_max);
        if (spectrum_cmd->parsed())
            return run_spectrum(g, targets_path, grid, n_max, q_box, measure_bounds);
        if (oracle_cmd->parsed()) return run_oracle(g, alpha_text, eps, n);
        if (check_cmd->parsed())
            return run_check(g, kind, index, n_max, p_text, z_text, z_entry, n_pairs, k_max);
        if (induce_cmd->parsed())
            return run_induce(g, p_text, z_text, z_entry, n_list_text, q_text, tau1, tau2, k0,
                              compare_out);
        if (measures_cmd->parsed()) return run_measures(g, q_text, n, sweeps, restarts);
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
