// Copyright 2026 The z2circ Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "z2circ/fss.h"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "z2circ/random.h"

namespace z2circ {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double std_of(const std::vector<double> &v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return std::sqrt(s / (v.size() - 1));
}

/// Linear-interpolated quantile of sorted data.
double quantile(const std::vector<double> &sorted, double q) {
    const double pos = q * (sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

std::vector<ScalingCurve> resample(const std::vector<ScalingCurve> &curves, RandomStream &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto out = curves;
    for (auto &c : out) {
        for (auto &pt : c.points) {
            pt.y += pt.dy * gauss(rng);
        }
    }
    return out;
}

void check_curves(const std::vector<ScalingCurve> &curves, const char *what) {
    if (curves.size() < 2) {
        throw AnalysisError(std::string(what) + " needs at least two curves");
    }
    for (const auto &c : curves) {
        c.validate();
    }
    for (std::size_t i = 0; i < curves.size(); ++i) {
        for (std::size_t j = i + 1; j < curves.size(); ++j) {
            if (curves[i].L == curves[j].L) {
                throw AnalysisError("two curves share L = " + std::to_string(curves[i].L));
            }
        }
    }
}

int sign_of(double d) { return d > 0.0 ? 1 : (d < 0.0 ? -1 : 0); }

}  // namespace

void ScalingCurve::validate() const {
    if (L <= 0) {
        throw AnalysisError("curve size L must be positive");
    }
    if (points.empty()) {
        throw AnalysisError("curve at L = " + std::to_string(L) + " has no points");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto &pt = points[i];
        if (!std::isfinite(pt.p) || !std::isfinite(pt.y) || !std::isfinite(pt.dy) || pt.dy < 0.0) {
            throw AnalysisError("curve at L = " + std::to_string(L) + " has a non-finite value or negative stderr");
        }
        if (i > 0 && !(pt.p > points[i - 1].p)) {
            throw AnalysisError("curve at L = " + std::to_string(L) + ": p must be strictly increasing");
        }
    }
}

double interpolate(const ScalingCurve &curve, double p) {
    const auto &pts = curve.points;
    const std::size_t n = pts.size();
    if (n < 2) {
        throw AnalysisError("interpolation needs at least two points");
    }
    if (p < pts.front().p || p > pts.back().p) {
        throw AnalysisError("interpolation outside the curve's p range");
    }
    // Interval [i, i+1] containing p; stencil of up to four nodes around it.
    std::size_t i = 0;
    while (i + 2 < n && pts[i + 1].p < p) {
        ++i;
    }
    const std::size_t width = std::min<std::size_t>(4, n);
    std::size_t start = i == 0 ? 0 : i - 1;
    start = std::min(start, n - width);
    double value = 0.0;
    for (std::size_t a = start; a < start + width; ++a) {
        double basis = 1.0;
        for (std::size_t b = start; b < start + width; ++b) {
            if (b != a) {
                basis *= (p - pts[b].p) / (pts[a].p - pts[b].p);
            }
        }
        value += basis * pts[a].y;
    }
    return value;
}

std::optional<double> pair_crossing(const ScalingCurve &small, const ScalingCurve &large,
                                    const CrossingOptions &options) {
    double lo = std::max(small.points.front().p, large.points.front().p);
    double hi = std::min(small.points.back().p, large.points.back().p);
    if (options.p_min) {
        lo = std::max(lo, *options.p_min);
    }
    if (options.p_max) {
        hi = std::min(hi, *options.p_max);
    }
    if (!(lo < hi)) {
        return std::nullopt;
    }
    std::vector<double> nodes{lo, hi};
    for (const auto *c : {&small, &large}) {
        for (const auto &pt : c->points) {
            if (pt.p > lo && pt.p < hi) {
                nodes.push_back(pt.p);
            }
        }
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    auto diff = [&](double p) { return interpolate(large, p) - interpolate(small, p); };

    double prev_p = 0.0;
    int prev_sign = 0;
    for (double p : nodes) {
        const int s = sign_of(diff(p));
        if (s == 0) {
            continue;
        }
        if (prev_sign != 0 && s != prev_sign) {
            const bool rising = prev_sign < 0;
            const bool wanted = options.direction == CrossingDirection::Any ||
                                (options.direction == CrossingDirection::Rising && rising) ||
                                (options.direction == CrossingDirection::Falling && !rising);
            if (wanted) {
                double a = prev_p;
                double b = p;
                for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
                    const double mid = 0.5 * (a + b);
                    const int sm = sign_of(diff(mid));
                    if (sm == 0) {
                        return mid;
                    }
                    (sm == prev_sign ? a : b) = mid;
                }
                return 0.5 * (a + b);
            }
        }
        prev_sign = s;
        prev_p = p;
    }
    return std::nullopt;
}

nlohmann::json CrossingResult::to_json() const {
    nlohmann::json j;
    j["p_c"] = p_c;
    j["error"] = error;
    j["spread"] = spread;
    j["num_pairs"] = num_pairs;
    j["all_pairs_cross"] = all_pairs_cross();
    j["bootstrap_used"] = bootstrap_used;
    auto &arr = j["pairs"] = nlohmann::json::array();
    for (const auto &pc : pairs) {
        arr.push_back({{"L_small", pc.L_small}, {"L_large", pc.L_large}, {"p", pc.p}});
    }
    return j;
}

CrossingResult find_crossing(const std::vector<ScalingCurve> &curves_in, const CrossingOptions &options) {
    check_curves(curves_in, "find_crossing");
    auto curves = curves_in;
    std::sort(curves.begin(), curves.end(), [](const auto &a, const auto &b) { return a.L < b.L; });

    auto crossings = [&](const std::vector<ScalingCurve> &cs) {
        std::vector<PairCrossing> out;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            for (std::size_t j = i + 1; j < cs.size(); ++j) {
                if (auto p = pair_crossing(cs[i], cs[j], options)) {
                    out.push_back({cs[i].L, cs[j].L, *p});
                }
            }
        }
        return out;
    };

    CrossingResult result;
    result.num_pairs = curves.size() * (curves.size() - 1) / 2;
    result.pairs = crossings(curves);
    if (result.pairs.empty()) {
        throw NoCrossingError("no crossing in window");
    }
    std::vector<double> ps;
    for (const auto &pc : result.pairs) {
        ps.push_back(pc.p);
    }
    result.p_c = mean_of(ps);
    result.spread = std_of(ps);

    RandomStream rng(options.seed, 0);
    std::vector<double> boot;
    for (int b = 0; b < options.bootstrap; ++b) {
        const auto pairs = crossings(resample(curves, rng));
        if (pairs.empty()) {
            continue;
        }
        double s = 0.0;
        for (const auto &pc : pairs) {
            s += pc.p;
        }
        boot.push_back(s / pairs.size());
    }
    result.bootstrap_used = boot.size();
    result.error = std_of(boot);
    return result;
}

std::vector<RescaledPoint> rescale(const std::vector<ScalingCurve> &curves, const CollapseParams &params) {
    std::vector<RescaledPoint> out;
    for (const auto &c : curves) {
        const double xs = std::pow(static_cast<double>(c.L), 1.0 / params.nu);
        const double ys = std::pow(static_cast<double>(c.L), params.beta / params.nu);
        for (const auto &pt : c.points) {
            if (pt.dy > 0.0) {
                out.push_back({c.L, pt.p, (pt.p - params.p_c) * xs, pt.y * ys, pt.dy * ys});
            }
        }
    }
    return out;
}

double collapse_quality(const std::vector<ScalingCurve> &curves, const CollapseParams &params) {
    check_curves(curves, "collapse_quality");
    if (!(params.nu > 0.0) || !std::isfinite(params.p_c) || !std::isfinite(params.beta)) {
        throw AnalysisError("collapse parameters out of domain");
    }
    auto pts = rescale(curves, params);
    std::sort(pts.begin(), pts.end(), [](const RescaledPoint &a, const RescaledPoint &b) {
        if (a.x != b.x) {
            return a.x < b.x;
        }
        if (a.L != b.L) {
            return a.L < b.L;
        }
        return a.p < b.p;
    });
    std::vector<int> sizes;
    for (const auto &c : curves) {
        sizes.push_back(c.L);
    }
    std::sort(sizes.begin(), sizes.end());
    double total = 0.0;
    std::size_t terms = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
        int below = 0;
        int above = 0;
        auto take = [&](const RescaledPoint &q) {
            const double w = 1.0 / (q.dy * q.dy);
            S += w;
            Sx += w * q.x;
            Sy += w * q.y;
            Sxx += w * q.x * q.x;
            Sxy += w * q.x * q.y;
        };
        // per other curve, the nearest point on each side of x_i; curves that
        // do not bracket x_i are skipped
        for (int L : sizes) {
            if (L == pts[i].L) {
                continue;
            }
            const RescaledPoint *lo = nullptr;
            const RescaledPoint *hi = nullptr;
            for (std::size_t k = i; k-- > 0;) {
                if (pts[k].L == L) {
                    lo = &pts[k];
                    break;
                }
            }
            for (std::size_t k = i + 1; k < pts.size(); ++k) {
                if (pts[k].L == L) {
                    hi = &pts[k];
                    break;
                }
            }
            if (lo && hi) {
                take(*lo);
                take(*hi);
                ++below;
                ++above;
            }
        }
        if (below == 0 || above == 0) {
            continue;
        }
        const double x = pts[i].x;
        const double det = S * Sxx - Sx * Sx;
        double Y;
        double varY;
        if (det <= 1e-12 * S * Sxx) {
            Y = Sy / S;
            varY = 1.0 / S;
        } else {
            Y = ((Sxx * Sy - Sx * Sxy) + x * (S * Sxy - Sx * Sy)) / det;
            varY = (Sxx - 2.0 * x * Sx + x * x * S) / det;
        }
        const double r = pts[i].y - Y;
        total += r * r / (pts[i].dy * pts[i].dy + varY);
        ++terms;
    }
    if (terms == 0) {
        throw AnalysisError("collapse is degenerate: no point lies inside the other curves' range");
    }
    return total / static_cast<double>(terms);
}

namespace {

struct Fitter {
    const std::vector<ScalingCurve> *curves;
    CollapseBounds bounds;
    std::vector<int> free;  // indices into (p_c, nu, beta)
    CollapseParams fixed;

    const std::array<double, 2> &bound(int k) const {
        return k == 0 ? bounds.p_c : (k == 1 ? bounds.nu : bounds.beta);
    }

    static double &slot(CollapseParams &p, int k) { return k == 0 ? p.p_c : (k == 1 ? p.nu : p.beta); }
    static double get(const CollapseParams &p, int k) { return k == 0 ? p.p_c : (k == 1 ? p.nu : p.beta); }

    CollapseParams params_of(const double *v) const {
        CollapseParams p = fixed;
        for (std::size_t i = 0; i < free.size(); ++i) {
            slot(p, free[i]) = v[i];
        }
        return p;
    }

    double objective(const double *v) const {
        double outside = 0.0;
        for (std::size_t i = 0; i < free.size(); ++i) {
            const auto &b = bound(free[i]);
            outside += std::max(0.0, b[0] - v[i]) + std::max(0.0, v[i] - b[1]);
        }
        if (outside > 0.0) {
            return 1e12 * (1.0 + outside);
        }
        try {
            const double q = collapse_quality(*curves, params_of(v));
            return std::isfinite(q) ? q : 1e12;
        } catch (const AnalysisError &) {
            return 1e12;
        }
    }

    static double gsl_f(const gsl_vector *x, void *self) {
        return static_cast<const Fitter *>(self)->objective(x->data);
    }

    /// Nelder-Mead from `start`; returns the best point found.
    CollapseParams simplex(const CollapseParams &start, double *best_value) const {
        const std::size_t n = free.size();
        if (n == 0) {
            *best_value = objective(nullptr);
            return start;
        }
        gsl_multimin_function fn{&Fitter::gsl_f, n, const_cast<Fitter *>(this)};
        gsl_vector *x = gsl_vector_alloc(n);
        gsl_vector *step = gsl_vector_alloc(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto &b = bound(free[i]);
            gsl_vector_set(x, i, get(start, free[i]));
            gsl_vector_set(step, i, (b[1] - b[0]) / 20.0);
        }
        gsl_multimin_fminimizer *m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
        gsl_multimin_fminimizer_set(m, &fn, x, step);
        for (int it = 0; it < 1000; ++it) {
            if (gsl_multimin_fminimizer_iterate(m)) {
                break;
            }
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), 1e-7) == GSL_SUCCESS) {
                break;
            }
        }
        const CollapseParams best = params_of(gsl_multimin_fminimizer_x(m)->data);
        *best_value = gsl_multimin_fminimizer_minimum(m);
        gsl_multimin_fminimizer_free(m);
        gsl_vector_free(step);
        gsl_vector_free(x);
        return best;
    }
};

}  // namespace

bool CollapseResult::contains(const CollapseParams &truth) const {
    const double v[3] = {truth.p_c, truth.nu, truth.beta};
    for (int k = 0; k < 3; ++k) {
        if (v[k] < interval[k][0] || v[k] > interval[k][1]) {
            return false;
        }
    }
    return true;
}

nlohmann::json CollapseResult::to_json() const {
    nlohmann::json j;
    j["p_c"] = params.p_c;
    j["nu"] = params.nu;
    j["beta"] = params.beta;
    j["quality"] = quality;
    j["num_points"] = num_points;
    j["confidence"] = confidence;
    j["bootstrap"] = bootstrap;
    const char *names[3] = {"p_c", "nu", "beta"};
    for (int k = 0; k < 3; ++k) {
        j["interval"][names[k]] = {interval[k][0], interval[k][1]};
        j["bootstrap_std"][names[k]] = bootstrap_std[k];
    }
    j["converged"] = converged;
    j["on_bound"] = on_bound;
    return j;
}

CollapseResult optimize_collapse(const std::vector<ScalingCurve> &curves, const CollapseBounds &bounds,
                                 const CollapseOptions &options) {
    check_curves(curves, "optimize_collapse");
    Fitter fit{&curves, bounds, {}, {}};
    for (int k = 0; k < 3; ++k) {
        const auto &b = fit.bound(k);
        if (!(b[0] <= b[1]) || !std::isfinite(b[0]) || !std::isfinite(b[1])) {
            throw AnalysisError("invalid collapse bounds");
        }
        if (k == 1 && !(b[0] > 0.0)) {
            throw AnalysisError("nu bounds must be positive");
        }
        Fitter::slot(fit.fixed, k) = b[0];
        if (b[1] > b[0]) {
            fit.free.push_back(k);
        }
    }
    if (options.grid < 2 && !fit.free.empty()) {
        throw AnalysisError("collapse grid needs at least two points per parameter");
    }

    // Coarse grid.
    const std::size_t nfree = fit.free.size();
    std::vector<double> v(nfree);
    std::vector<int> idx(nfree, 0);
    double best_q = kInf;
    CollapseParams best = fit.fixed;
    for (;;) {
        for (std::size_t i = 0; i < nfree; ++i) {
            const auto &b = fit.bound(fit.free[i]);
            v[i] = b[0] + (b[1] - b[0]) * idx[i] / (options.grid - 1);
        }
        const double q = fit.objective(v.data());
        if (q < best_q) {
            best_q = q;
            best = fit.params_of(v.data());
        }
        std::size_t i = 0;
        while (i < nfree && ++idx[i] == options.grid) {
            idx[i++] = 0;
        }
        if (i == nfree) {
            break;
        }
    }
    if (best_q >= 1e12) {
        throw AnalysisError("collapse is degenerate everywhere on the parameter grid");
    }
    double refined_q;
    const CollapseParams refined = fit.simplex(best, &refined_q);
    if (refined_q < best_q) {
        best = refined;
        best_q = refined_q;
    }

    CollapseResult result;
    result.params = best;
    result.quality = best_q;
    result.num_points = rescale(curves, best).size();
    result.confidence = options.confidence;
    const char *names[3] = {"p_c", "nu", "beta"};
    for (int k : fit.free) {
        const auto &b = fit.bound(k);
        const double val = Fitter::get(best, k);
        const double tol = 1e-3 * (b[1] - b[0]);
        if (val - b[0] < tol || b[1] - val < tol) {
            result.on_bound.push_back(names[k]);
            result.converged = false;
        }
    }

    // Gaussian parametric bootstrap, refitting from the optimum.
    std::array<std::vector<double>, 3> samples;
    RandomStream rng(options.seed, 1);
    for (int b = 0; b < options.bootstrap; ++b) {
        const auto resampled = resample(curves, rng);
        Fitter bf = fit;
        bf.curves = &resampled;
        double q;
        const auto p = bf.simplex(best, &q);
        if (q >= 1e12) {
            continue;
        }
        for (int k = 0; k < 3; ++k) {
            samples[k].push_back(Fitter::get(p, k));
        }
    }
    result.bootstrap = static_cast<int>(samples[0].size());
    const double alpha = (1.0 - options.confidence) / std::max<std::size_t>(1, nfree);
    for (int k = 0; k < 3; ++k) {
        const double val = Fitter::get(best, k);
        result.interval[k] = {val, val};
        if (std::find(fit.free.begin(), fit.free.end(), k) == fit.free.end() || samples[k].size() < 2) {
            continue;
        }
        auto s = samples[k];
        std::sort(s.begin(), s.end());
        result.interval[k] = {quantile(s, alpha / 2), quantile(s, 1.0 - alpha / 2)};
        result.bootstrap_std[k] = std_of(s);
    }
    return result;
}

std::vector<ScalingCurve> read_sweep_curves(std::istream &in, const std::string &observable) {
    static const char *kHeader = "dimension,L,p,sweeps,n_traj,observable,mean,stderr,sampling_mode,seed";
    std::string line;
    if (!std::getline(in, line)) {
        throw AnalysisError("empty sweep CSV");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kHeader) {
        throw AnalysisError("unexpected CSV header: '" + line + "'");
    }
    auto parse = [](const std::string &field, auto &out, std::size_t row) {
        const auto *first = field.data();
        const auto *last = first + field.size();
        auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec != std::errc() || ptr != last || field.empty()) {
            throw AnalysisError("row " + std::to_string(row) + ": cannot parse '" + field + "'");
        }
    };
    std::map<int, std::vector<CurvePoint>> by_L;
    int dimension = 0;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() != 10) {
            throw AnalysisError("row " + std::to_string(row) + ": expected 10 columns, got " +
                                std::to_string(f.size()));
        }
        int dim = 0;
        int L = 0;
        CurvePoint pt;
        parse(f[0], dim, row);
        parse(f[1], L, row);
        parse(f[2], pt.p, row);
        parse(f[6], pt.y, row);
        parse(f[7], pt.dy, row);
        if (dimension == 0) {
            dimension = dim;
        } else if (dim != dimension) {
            throw AnalysisError("CSV mixes dimensions");
        }
        if (f[5] == observable) {
            by_L[L].push_back(pt);
        }
    }
    if (by_L.empty()) {
        throw AnalysisError("no rows for observable '" + observable + "'");
    }
    std::vector<ScalingCurve> curves;
    for (auto &[L, pts] : by_L) {
        std::sort(pts.begin(), pts.end(), [](const auto &a, const auto &b) { return a.p < b.p; });
        ScalingCurve c{L, std::move(pts)};
        c.validate();
        curves.push_back(std::move(c));
    }
    return curves;
}

std::vector<ScalingCurve> restrict_window(const std::vector<ScalingCurve> &curves, double p_min, double p_max) {
    std::vector<ScalingCurve> out;
    for (const auto &c : curves) {
        ScalingCurve r{c.L, {}};
        for (const auto &pt : c.points) {
            if (pt.p >= p_min && pt.p <= p_max) {
                r.points.push_back(pt);
            }
        }
        if (!r.points.empty()) {
            out.push_back(std::move(r));
        }
    }
    return out;
}

void write_rescaled_csv(std::ostream &out, const std::vector<RescaledPoint> &points) {
    auto num = [](double x) {
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
        return std::string(buf, end);
    };
    out << "L,p,x,y,dy\n";
    for (const auto &pt : points) {
        out << pt.L << ',' << num(pt.p) << ',' << num(pt.x) << ',' << num(pt.y) << ',' << num(pt.dy) << '\n';
    }
}

}  // namespace z2circ
