#include "lyapress/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lyapress/errors.hpp"
#include "lyapress/numeric.hpp"
#include "lyapress/rng.hpp"

namespace lyapress {

LyapunovTarget::LyapunovTarget(Vector a) : alpha(std::move(a)) {
    for (int i = 1; i < alpha.size(); ++i)
        if (alpha(i) > alpha(i - 1) + 1e-12)
            throw ValidationError("Lyapunov target must be decreasing");
}

std::string to_string(SpectrumMethod m) {
    switch (m) {
        case SpectrumMethod::Duality: return "duality";
        case SpectrumMethod::Oracle: return "oracle";
        case SpectrumMethod::MeasureSup: return "measure-sup";
    }
    return "unknown";
}

namespace {

// Gilbert/Frank-Wolfe distance from a point to the convex hull of a finite
// vertex set; exact enough at the tolerances used for membership.
double hull_distance(const std::vector<Vector>& verts, const Vector& p) {
    if (verts.empty()) return std::numeric_limits<double>::infinity();
    Vector x = verts[0];
    double best = (p - x).norm();
    for (const auto& v : verts) {
        const double dv = (p - v).norm();
        if (dv < best) { best = dv; x = v; }
    }
    for (int it = 0; it < 512; ++it) {
        const Vector dir = p - x;
        const double dn = dir.norm();
        if (dn < 1e-14) return 0.0;
        // support point of the hull in direction dir
        int s = 0;
        double sbest = dir.dot(verts[0]);
        for (std::size_t i = 1; i < verts.size(); ++i) {
            const double val = dir.dot(verts[i]);
            if (val > sbest) { sbest = val; s = static_cast<int>(i); }
        }
        const Vector& v = verts[s];
        if (dir.dot(v - x) <= 1e-15 * (1.0 + dn)) break;   // no improving vertex
        // project p onto the segment [x, v]
        const Vector seg = v - x;
        const double t = std::clamp(seg.dot(p - x) / seg.squaredNorm(), 0.0, 1.0);
        x += t * seg;
        const double d = (p - x).norm();
        if (d >= best - 1e-16) break;
        best = d;
    }
    return (p - x).norm();
}

std::vector<Vector> hull_2d(std::vector<Vector> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
        return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vector& a, const Vector& b) {
                              return a(0) == b(0) && a(1) == b(1);
                          }),
              pts.end());
    if (pts.size() <= 2) return pts;
    auto cross = [](const Vector& o, const Vector& a, const Vector& b) {
        return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
    };
    std::vector<Vector> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0)
            hull.pop_back();
        hull.push_back(p);
    }
    const std::size_t lower = hull.size() + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), *it) <= 0)
            hull.pop_back();
        hull.push_back(*it);
    }
    hull.pop_back();
    return hull;
}

std::vector<Vector> probe_directions(int d, std::uint64_t seed) {
    std::vector<Vector> dirs;
    for (int i = 0; i < d; ++i) {
        Vector e = Vector::Zero(d);
        e(i) = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
    }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            for (double si : {1.0, -1.0})
                for (double sj : {1.0, -1.0}) {
                    Vector e = Vector::Zero(d);
                    e(i) = si;
                    e(j) = sj;
                    dirs.push_back(e.normalized());
                }
    Rng rng(seed);
    const int extra = 8 * d;
    for (int r = 0; r < extra; ++r) {
        Vector e(d);
        for (int i = 0; i < d; ++i) {
            const double u1 = std::max(rng.next_double(), 1e-300);
            const double u2 = rng.next_double();
            e(i) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
        dirs.push_back(e.normalized());
    }
    return dirs;
}

} // namespace

double SpectrumEstimate::distance(const Vector& alpha) const {
    return hull_distance(hull_vertices, alpha);
}

bool SpectrumEstimate::contains(const Vector& alpha, double tol) const {
    return distance(alpha) <= tol;
}

bool SpectrumEstimate::interior(const Vector& alpha, double margin) const {
    if (hull_vertices.empty()) return false;
    const int d = static_cast<int>(alpha.size());
    if (d == 1) {
        double lo = hull_vertices[0](0), hi = lo;
        for (const auto& v : hull_vertices) {
            lo = std::min(lo, v(0));
            hi = std::max(hi, v(0));
        }
        return alpha(0) >= lo + margin && alpha(0) <= hi - margin;
    }
    for (const auto& u : probe_directions(d, 7)) {
        if (distance(alpha + margin * u) > 1e-9) return false;
    }
    return true;
}

SpectrumEstimate estimate_spectrum_domain(const CocycleSpec& c, int n, const SweepOptions& opts) {
    const int d = c.dimension();
    SpectrumEstimate out;
    out.n = n;
    using Pts = std::vector<Vector>;
    const auto dirs = (d >= 3) ? probe_directions(d, 11) : Pts{};

    Pts pts = sweep_accumulate<Pts>(
        c, n, opts,
        [&](Pts& acc, const CylinderView& view) {
            int best = 0;
            for (int j = 1; j < view.num_candidates(); ++j)
                if (view.candidate(j)[0] > view.candidate(best)[0]) best = j;
            const auto rep = view.candidate(best);
            Vector v(d);
            for (int i = 0; i < d; ++i) v(i) = rep[i] / n;
            if (d <= 2) {
                acc.push_back(v);
                return;
            }
            // keep extreme points along the direction grid only
            if (acc.empty()) {
                acc.assign(dirs.size(), v);
                return;
            }
            for (std::size_t j = 0; j < dirs.size(); ++j)
                if (dirs[j].dot(v) > dirs[j].dot(acc[j])) acc[j] = v;
        },
        [&](Pts& into, const Pts& from) {
            if (d <= 2) {
                into.insert(into.end(), from.begin(), from.end());
                return;
            }
            if (from.empty()) return;
            if (into.empty()) { into = from; return; }
            for (std::size_t j = 0; j < dirs.size(); ++j)
                if (dirs[j].dot(from[j]) > dirs[j].dot(into[j])) into[j] = from[j];
        },
        Pts{});

    if (d == 1) {
        double lo = pts[0](0), hi = lo;
        for (const auto& v : pts) {
            lo = std::min(lo, v(0));
            hi = std::max(hi, v(0));
        }
        out.hull_vertices.push_back(Vector::Constant(1, lo));
        out.hull_vertices.push_back(Vector::Constant(1, hi));
    } else if (d == 2) {
        out.hull_vertices = hull_2d(std::move(pts));
    } else {
        // dedup the extreme points
        for (const auto& v : pts) {
            bool dup = false;
            for (const auto& w : out.hull_vertices)
                if ((v - w).norm() < 1e-12) { dup = true; break; }
            if (!dup) out.hull_vertices.push_back(v);
        }
    }
    return out;
}

double default_oracle_eps(const SpectrumEstimate& domain, int n) {
    double diam = 0.0;
    for (std::size_t i = 0; i < domain.hull_vertices.size(); ++i)
        for (std::size_t j = i + 1; j < domain.hull_vertices.size(); ++j)
            diam = std::max(diam, (domain.hull_vertices[i] - domain.hull_vertices[j]).norm());
    return std::max(2.0 * diam / n, 1e-6);
}

SpectrumPoint level_set_entropy_oracle(const CocycleSpec& c, const LyapunovTarget& alpha,
                                       int n, double eps, const SweepOptions& opts) {
    const int d = c.dimension();
    if (alpha.alpha.size() != d) throw ValidationError("alpha dimension mismatch");
    std::uint64_t count = sweep_accumulate<std::uint64_t>(
        c, n, opts,
        [&](std::uint64_t& acc, const CylinderView& view) {
            int best = 0;
            for (int j = 1; j < view.num_candidates(); ++j)
                if (view.candidate(j)[0] > view.candidate(best)[0]) best = j;
            const auto rep = view.candidate(best);
            for (int i = 0; i < d; ++i)
                if (std::abs(rep[i] / n - alpha.alpha(i)) >= eps) return;
            ++acc;
        },
        [](std::uint64_t& into, const std::uint64_t& from) { into += from; }, std::uint64_t{0});

    SpectrumPoint out;
    out.alpha = alpha.alpha;
    out.method = SpectrumMethod::Oracle;
    out.n = n;
    if (count == 0) {
        out.empty_level_set = true;
        return out;
    }
    out.entropy = std::log(static_cast<double>(count)) / n;
    return out;
}

namespace {

struct LegendreObjective {
    const CylinderTable& table;
    const Vector& alpha;
    int n;
    mutable std::vector<double> scratch;

    double operator()(const Vector& q) const {
        std::span<const double> qs(q.data(), q.size());
        table.word_values(qs, scratch);
        return log_sum_exp(scratch) / n - q.dot(alpha);
    }

    // Exact gradient: softmax-weighted mean of the per-word maximizing
    // candidate sigma vectors divided by n, minus alpha.  The softmax weights
    // reuse the representative-based word values, which agree with the exact
    // subgradient off candidate ties.
    Vector gradient(const Vector& q) const {
        const int d = static_cast<int>(q.size());
        std::span<const double> qs(q.data(), q.size());
        table.word_values(qs, scratch);
        double hi = kNegInf;
        for (double v : scratch) hi = std::max(hi, v);
        Vector acc = Vector::Zero(d);
        double total = 0.0;
        for (std::uint64_t i = 0; i < table.num_words(); ++i) {
            const double w = std::exp(scratch[i] - hi);
            total += w;
            // argmax candidate of word i under q
            const auto cands = table.candidates(i);
            const int nc = static_cast<int>(cands.size()) / d;
            int best = 0;
            double bval = kNegInf;
            for (int j = 0; j < nc; ++j) {
                double dot = 0.0;
                for (int t = 0; t < d; ++t) dot += q(t) * cands[static_cast<std::size_t>(j) * d + t];
                if (dot > bval) { bval = dot; best = j; }
            }
            for (int t = 0; t < d; ++t)
                acc(t) += w * cands[static_cast<std::size_t>(best) * d + t];
        }
        return (acc / (total * n) - alpha).eval();
    }
};

// coordinate-wise golden-section descent within [-box, box]^d
Vector coordinate_golden(const LegendreObjective& f, Vector q, double box, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double improved = 1.0;
    double fq = f(q);
    for (int sweep = 0; sweep < 64 && improved > tol * 0.1; ++sweep) {
        improved = 0.0;
        for (int i = 0; i < q.size(); ++i) {
            double lo = -box, hi = box;
            Vector probe = q;
            auto eval = [&](double v) {
                probe(i) = v;
                return f(probe);
            };
            double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
            double f1 = eval(x1), f2 = eval(x2);
            while (hi - lo > tol) {
                if (f1 <= f2) {
                    hi = x2; x2 = x1; f2 = f1;
                    x1 = hi - gr * (hi - lo);
                    f1 = eval(x1);
                } else {
                    lo = x1; x1 = x2; f1 = f2;
                    x2 = lo + gr * (hi - lo);
                    f2 = eval(x2);
                }
            }
            const double xm = 0.5 * (lo + hi);
            const double fm = eval(xm);
            if (fm < fq - 1e-15) {
                improved += fq - fm;
                q(i) = xm;
                fq = fm;
            }
        }
    }
    return q;
}

Vector gradient_polish(const LegendreObjective& f, Vector q, double box, double tol) {
    double fq = f(q);
    double step = 1.0;
    for (int it = 0; it < 200; ++it) {
        const Vector g = f.gradient(q);
        if (g.norm() < tol * 1e-2) break;
        bool moved = false;
        for (int tries = 0; tries < 30; ++tries) {
            Vector cand = q - step * g;
            for (int i = 0; i < cand.size(); ++i) cand(i) = std::clamp(cand(i), -box, box);
            const double fc = f(cand);
            if (fc < fq - 1e-15) {
                q = std::move(cand);
                fq = fc;
                step *= 1.5;
                moved = true;
                break;
            }
            step *= 0.5;
            if (step < 1e-12) break;
        }
        if (!moved) break;
    }
    return q;
}

} // namespace

SpectrumPoint legendre_entropy(const CocycleSpec& c, const LyapunovTarget& alpha, int n_max,
                               const SpectrumOptions& opts) {
    const int d = c.dimension();
    if (alpha.alpha.size() != d) throw ValidationError("alpha dimension mismatch");
    SweepOptions sweep{opts.budget, opts.threads};
    const SpectrumEstimate domain = estimate_spectrum_domain(c, n_max, sweep);

    SpectrumPoint out;
    out.alpha = alpha.alpha;
    out.method = SpectrumMethod::Duality;
    out.n = n_max;
    if (!domain.contains(alpha.alpha, 1e-9)) {
        if (domain.distance(alpha.alpha) > opts.interior_margin)
            throw TargetOutsideDomain("alpha lies outside the estimated spectrum domain");
        out.boundary_target = true;   // within the collar: reported, no claimed validity
    } else if (!domain.interior(alpha.alpha, opts.interior_margin)) {
        out.boundary_target = true;
    }

    const CylinderTable table = CylinderTable::build(c, n_max, sweep);
    LegendreObjective obj{table, alpha.alpha, n_max, {}};

    std::vector<Vector> starts;
    starts.push_back(Vector::Zero(d));
    starts.push_back(Vector::Constant(d, opts.q_box / 2));
    starts.push_back(Vector::Constant(d, -opts.q_box / 2));
    Vector best_q;
    double best_f = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        Vector q = coordinate_golden(obj, s, opts.q_box, opts.q_tol);
        q = gradient_polish(obj, q, opts.q_box, opts.q_tol);
        const double fq = obj(q);
        if (fq < best_f) {
            best_f = fq;
            best_q = q;
        }
    }
    out.q_star = best_q;
    out.entropy = std::max(best_f, 0.0);
    for (int i = 0; i < d; ++i)
        if (std::abs(best_q(i)) >= opts.q_box * (1.0 - 1e-9)) out.boundary_hit = true;
    return out;
}

std::vector<SpectrumPoint> spectrum_curve(const CocycleSpec& c,
                                          const std::vector<LyapunovTarget>& targets,
                                          int n_max, const SpectrumOptions& opts) {
    std::vector<SpectrumPoint> out;
    for (const auto& target : targets) {
        SpectrumPoint point;
        try {
            point = legendre_entropy(c, target, n_max, opts);
        } catch (const TargetOutsideDomain&) {
            point.alpha = target.alpha;
            point.method = SpectrumMethod::Duality;
            point.n = n_max;
            point.empty_level_set = true;
            out.push_back(point);
            continue;
        }
        if (opts.attach_measure_bound) {
            MaximizeOptions mopts;
            mopts.restarts = opts.measure_restarts;
            mopts.seed = opts.seed;
            mopts.budget = opts.budget;
            mopts.threads = opts.threads;
            const auto lower = maximize_entropy_at_alpha(c, target.alpha, n_max, mopts);
            point.measure_lower = lower.entropy;
            point.measure_chi_gap = lower.chi_distance;
        }
        out.push_back(point);
    }
    return out;
}

} // namespace lyapress
