// Acceptance checks. `acceptance` runs all nine criteria; `acceptance K ...`
// runs the listed ones. One line per criterion: "criterion K: PASS|FAIL | ...".
// Exit status is nonzero when any selected criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "targetcost.hpp"
#include "verify_suite.hpp"

namespace tc = targetcost;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Run {
    int code = -1;
    std::string out;
    double seconds = 0.0;
};

Run run_cli(const std::string& args) {
    const std::string cmd = std::string(TARGETCOST_CLI) + " " + args + " 2>/dev/null";
    Run r;
    const auto start = std::chrono::steady_clock::now();
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fmt(double v, int digits = 6) {
    std::ostringstream ss;
    ss.precision(digits);
    ss << v;
    return ss.str();
}

const tc::ShootingResult& calibrated(double p) {
    static const tc::ShootingResult p15 = tc::shoot(1.5);
    static const tc::ShootingResult p2 = tc::shoot(2.0);
    static const tc::ShootingResult p3 = tc::shoot(3.0);
    return p == 1.5 ? p15 : (p == 2.0 ? p2 : p3);
}

Outcome criterion1() {
    const auto r = run_cli("oracle --n 2000 --T 1 --c 0 --p 2");
    if (r.code != 0) return {false, "oracle exited with " + std::to_string(r.code)};
    const double v = json::parse(r.out)["value"].get<double>();
    const bool ok = std::abs(v - 0.88) <= 0.02 && r.seconds < 5.0;
    return {ok, "value=" + fmt(v) + " (target 0.88 +- 0.02), runtime=" + fmt(r.seconds, 3) + "s (limit 5s)"};
}

Outcome criterion2() {
    const auto csv = std::filesystem::temp_directory_path() / "targetcost_acceptance" / "g2.csv";
    const auto r = run_cli("calibrate --p 2 --out " + csv.string());
    if (r.code != 0) return {false, "calibrate exited with " + std::to_string(r.code)};
    const auto j = json::parse(r.out);
    const double gamma = j["gamma"].get<double>(), g_mid = j["g_mid"].get<double>();
    const bool ok = gamma >= -0.23 && gamma <= -0.19 && g_mid >= 0.86 && g_mid <= 0.90 && r.seconds < 30.0;
    std::string reference_pair;
    try {
        const auto curve = tc::integrate_g(2.0, 0.88, -0.21);
        reference_pair = "g(eps)=" + fmt(curve.g().front()) + ", g(1-eps)=" + fmt(curve.g().back());
    } catch (const std::exception& e) {
        reference_pair = e.what();
    }
    return {ok, "gamma=" + fmt(gamma) + " (target [-0.23, -0.19]), g_mid=" + fmt(g_mid) +
                    " (target [0.86, 0.90]), runtime=" + fmt(r.seconds, 3) + "s; slope in c at c=0: " +
                    fmt(j["threshold_slope"].get<double>()) + "; integrating from (0.88, -0.21): " + reference_pair};
}

Outcome criterion3() {
    const auto& curve = calibrated(2.0).curve;
    std::vector<double> levels;
    for (int i = 1; i <= 9; ++i) levels.push_back(i / 10.0);
    double worst = 0.0, at = 0.0;
    for (const auto& pt : tc::dp_g_profile(2000, 2.0, levels)) {
        const double d = std::abs(tc::eval_g(curve, pt.y).g - pt.g);
        if (d > worst) {
            worst = d;
            at = pt.y;
        }
    }
    return {worst <= 0.02, "max |eval_g - dp_g_profile(2000)|=" + fmt(worst) + " at y=" + fmt(at) + " (limit 0.02)"};
}

Outcome criterion4() {
    bool ok = true;
    std::string detail;
    const std::size_t n = 2000;
    for (double p : {1.5, 2.0, 3.0}) {
        for (auto [T, c] : {std::pair{0.25, -0.5}, {1.0, 0.0}, {4.0, 1.0}}) {
            const double lhs = tc::dp_value(n, T, c, p);
            const double rhs = std::pow(T, 1.0 - p) * tc::dp_value(n, 1.0, c / std::sqrt(T), p);
            const double gap = std::abs(tc::dp_value(2 * n, T, c, p) - lhs);
            const bool good = std::abs(lhs - rhs) <= 2.0 * gap;
            ok = ok && good;
            detail += (detail.empty() ? "" : "; ") + std::string("p=") + fmt(p) + ",T=" + fmt(T) + ",c=" + fmt(c) +
                      ": diff=" + fmt(std::abs(lhs - rhs), 3) + " vs 2*gap=" + fmt(2.0 * gap, 3);
        }
    }
    return {ok, detail};
}

Outcome criterion5() {
    const auto& curve = calibrated(2.0).curve;
    const tc::Params params{2.0, 1.0, 0.0, 0.0};
    const std::size_t paths = 100000, steps = 2000;
    const std::uint64_t seed = 20240611;
    const auto base = tc::mc_cost_estimate(curve, params, paths, steps, seed);
    bool ok = std::abs(base.mean - 0.88) <= 0.02 + 3.0 * base.std_error;
    std::size_t violations = base.feasibility_violations;
    std::string detail = "mean=" + fmt(base.mean) + " stderr=" + fmt(base.std_error, 3) +
                         " (target 0.88 +- (0.02 + 3*stderr))";
    for (auto [lo, hi] : {std::pair{0.1, 0.5}, {0.5, 0.9}}) {
        for (double eta : {0.05, -0.05}) {
            const tc::PerturbedG<tc::GCurve> bumped(curve, lo, hi, eta);
            const auto est = tc::mc_cost_estimate(bumped, params, paths, steps, seed);
            violations += est.feasibility_violations;
            // Same seed for both runs: the standard error of the difference is
            // taken from the per-path differences.
            double m = 0.0, ss = 0.0;
            for (std::size_t i = 0; i < paths; ++i) m += est.costs[i] - base.costs[i];
            m /= static_cast<double>(paths);
            for (std::size_t i = 0; i < paths; ++i) {
                const double d = est.costs[i] - base.costs[i] - m;
                ss += d * d;
            }
            const double paired_se = std::sqrt(ss / static_cast<double>(paths - 1) / static_cast<double>(paths));
            const double indep_se = std::hypot(est.std_error, base.std_error);
            const bool good = m > 3.0 * paired_se;
            ok = ok && good;
            detail += "; bump " + fmt(eta, 2) + " on [" + fmt(lo, 2) + "," + fmt(hi, 2) + "]: +" + fmt(m, 3) +
                      " vs 3*se(diff)=" + fmt(3.0 * paired_se, 3) + " (3*sqrt(se1^2+se2^2)=" + fmt(3.0 * indep_se, 3) +
                      ")";
        }
    }
    ok = ok && violations == 0;
    detail += "; feasibility violations=" + std::to_string(violations);
    return {ok, detail};
}

Outcome criterion6() {
    const auto& curve = calibrated(2.0).curve;
    const std::size_t paths = 4000;
    const double delta = 0.1;
    bool ok = true;
    std::string detail = "n_paths=" + std::to_string(paths) + " delta=" + fmt(delta);
    double rms500 = 0.0, rms2000 = 0.0;
    std::size_t negative = 0;
    for (std::size_t n : {500u, 1000u, 2000u}) {
        const auto s = tc::bsde_residual(curve, 2.0, 1.0, 0.0, paths, n, delta, 20240611);
        const bool centred = std::abs(s.mean_residual) <= 3.0 * s.std_error;
        ok = ok && centred;
        negative += s.negative_z;
        if (n == 500) rms500 = s.rms_residual;
        if (n == 2000) rms2000 = s.rms_residual;
        detail += "; n=" + std::to_string(n) + ": mean=" + fmt(s.mean_residual, 3) + " stderr=" + fmt(s.std_error, 3) +
                  " |mean|/stderr=" + fmt(std::abs(s.mean_residual) / s.std_error, 3) + " rms=" + fmt(s.rms_residual, 3) +
                  " min Z=" + fmt(s.min_z, 3);
    }
    ok = ok && rms2000 <= 0.6 * rms500 && negative == 0;
    detail += "; rms(2000)/rms(500)=" + fmt(rms2000 / rms500, 3) + " (limit 0.6); negative Z=" + std::to_string(negative);
    return {ok, detail};
}

Outcome criterion7() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double T = 0.05 + 5.0 * unit(rng), x = -0.5 + 2.0 * unit(rng), lam = 0.05 + 5.0 * unit(rng);
        const double expected = T * (std::exp(lam * std::max(1.0 - x, 0.0) / T) - 1.0);
        worst = std::max(worst, std::abs(tc::exp_value(T, x, lam) - expected) / std::max(1e-3, expected));
    }
    bool ok = worst <= 1e-12;

    const double T = 1.0, x = 0.0, lam = 1.0;
    const double w = tc::exp_value(T, x, lam);
    double min_excess = 1e300;
    int losers = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double a = 0.1 + unit(rng), f = 1.0 + 4.0 * unit(rng), ph = 6.283185307179586 * unit(rng);
        auto profile = [&](double t) { return 0.3 + a * (1.0 + std::sin(6.283185307179586 * f * t + ph)); };
        auto cost_at = [&](std::size_t points) {
            std::vector<double> u(points);
            for (std::size_t k = 0; k < points; ++k) u[k] = profile(T * static_cast<double>(k) / (points - 1));
            const double scale = (1.0 - x) / tc::profile_integral(u, T);
            for (auto& v : u) v *= scale;
            return tc::exp_cost_of_profile(u, T, lam);
        };
        const double coarse = cost_at(801), fine = cost_at(1601);
        const double quad_tol = std::abs(fine - coarse);
        const double margin = coarse - w;
        min_excess = std::min(min_excess, margin - quad_tol);
        if (!(margin > quad_tol)) ++losers;
    }
    ok = ok && losers == 0;
    return {ok, "max relative deviation from the closed form over 1000 points=" + fmt(worst, 3) +
                    "; profiles not beating value+quadrature tolerance: " + std::to_string(losers) +
                    "/100 (min margin beyond tolerance " + fmt(min_excess, 3) + ")"};
}

Outcome criterion8() {
    std::vector<tc::DualityWitness> ws;
    for (int n : tc::default_witness_sequence()) ws.push_back(tc::duality_witness(n, 1.0, 0.0));
    bool ent_dec = true, mass_inc = true;
    for (std::size_t i = 1; i < ws.size(); ++i) {
        ent_dec = ent_dec && ws[i].entropy < ws[i - 1].entropy;
        mass_inc = mass_inc && ws[i].mass > ws[i - 1].mass;
    }
    const auto& last = ws.back();
    const double gap = tc::duality_gap(last, 1.0, 0.0, 1.0);
    const bool ok = ent_dec && mass_inc && last.entropy < 0.05 && last.mass > 0.9 && gap < 0.05;
    std::string seq;
    for (const auto& w : ws) seq += " n=" + std::to_string(w.n) + ":(" + fmt(w.mass, 5) + "," + fmt(w.entropy, 5) + ")";
    return {ok, std::string("entropy decreasing=") + (ent_dec ? "yes" : "no") + ", mass increasing=" +
                    (mass_inc ? "yes" : "no") + ", entropy(64)=" + fmt(last.entropy) + " (limit 0.05), mass(64)=" +
                    fmt(last.mass) + " (limit 0.9), duality gap(64)=" + fmt(gap) + " (limit 0.05); (mass,entropy):" +
                    seq};
}

Outcome criterion9() {
    bool ok = true;
    std::string detail;
    for (double p : {1.5, 2.0, 3.0}) {
        const auto& shot = calibrated(p);
        const auto d = tc::diagnose(shot.curve);
        const auto y = shot.curve.y();
        const auto g = shot.curve.g();
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<std::size_t> pick(0, shot.curve.size() - 1);
        double chord_worst = -1.0;
        for (int t = 0; t < 200000; ++t) {
            std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
            if (i > j) std::swap(i, j);
            if (j > k) std::swap(j, k);
            if (i > j) std::swap(i, j);
            if (i == j || j == k) continue;
            const double chord = g[i] * (y[k] - y[j]) / (y[k] - y[i]) + g[k] * (y[j] - y[i]) / (y[k] - y[i]);
            chord_worst = std::max(chord_worst, chord - g[j]);
        }
        verify::Report rep;
        verify::inequality_suite(p, 1000, rep);
        verify::inner_min_suite(p, 50, 20240611, rep);
        const bool invariants = d.min_g >= 0.0 && d.max_g <= 1.0 && d.max_dg <= 1e-9 && d.max_chord_defect <= 1e-6 &&
                                d.min_lower_bound_gap >= -1e-6;
        const bool good = invariants && chord_worst <= 1e-6 && rep.passed();
        ok = ok && good;
        const auto j = rep.to_json({});
        detail += (detail.empty() ? "" : "; ") + std::string("p=") + fmt(p) + ": range [" + fmt(d.min_g, 3) + "," +
                  fmt(d.max_g, 3) + "], max dg=" + fmt(d.max_dg, 3) + ", max chord defect=" +
                  fmt(std::max(d.max_chord_defect, chord_worst), 3) + ", min g-(1-y)^p=" + fmt(d.min_lower_bound_gap, 3) +
                  ", split inequality min-1=" + fmt(j["checks"][0]["value"].get<double>(), 3) +
                  ", inner_min vs grid=" + fmt(j["checks"][1]["value"].get<double>(), 3);
    }
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                         criterion6, criterion7, criterion8, criterion9};
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty()) {
        for (int k = 1; k <= 9; ++k) selected.push_back(k);
    }
    bool all = true;
    for (int k : selected) {
        if (k < 1 || k > 9) {
            std::cerr << "unknown criterion " << k << '\n';
            return 2;
        }
        Outcome o;
        try {
            o = criteria[static_cast<std::size_t>(k - 1)]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << " | " << o.detail << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
