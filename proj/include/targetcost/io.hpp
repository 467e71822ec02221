#pragma once

// Plain-text outputs: g curve CSV plus JSON sidecar, oracle profile CSV,
// per-path dumps and the witness table. Numbers are written with %.17g so
// every double survives a round trip.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "targetcost/errors.hpp"
#include "targetcost/exp_case.hpp"
#include "targetcost/g_solver.hpp"
#include "targetcost/path_simulator.hpp"
#include "targetcost/walk_oracle.hpp"

namespace targetcost {

inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ResourceError("cannot open " + path.string() + " for writing");
    return out;
}

inline double parse_double(const std::string& field, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || errno == ERANGE) {
        throw UsageError(where + ": not a number: '" + field + "'");
    }
    return v;
}

}  // namespace detail

struct CurveSidecar {
    double p = 0.0;
    double epsilon = 0.0;
    double g_mid = 0.0;
    double gamma = 0.0;
    double left_residual = 0.0;
    double right_residual = 0.0;
    double threshold_slope = 0.0;
    bool ambiguous = false;
};

inline CurveSidecar sidecar_of(const ShootingResult& r) {
    return {r.curve.p(), r.curve.epsilon(), r.g_mid, r.gamma, r.left_residual,
            r.right_residual, r.threshold_slope, r.ambiguous};
}

inline nlohmann::json to_json(const CurveSidecar& s) {
    return {{"p", s.p},
            {"epsilon", s.epsilon},
            {"g_mid", s.g_mid},
            {"gamma", s.gamma},
            {"left_residual", s.left_residual},
            {"right_residual", s.right_residual},
            {"threshold_slope", s.threshold_slope},
            {"ambiguous", s.ambiguous}};
}

/// Sidecar path for a curve CSV: foo.csv -> foo.json.
inline std::filesystem::path sidecar_path(std::filesystem::path csv) {
    return csv.replace_extension(".json");
}

/// Writes `y,g,dg` to csv and the sidecar next to it.
inline void write_curve(const std::filesystem::path& csv, const GCurve& curve, const CurveSidecar& meta) {
    auto out = detail::open_out(csv);
    out << "y,g,dg\n";
    const auto y = curve.y(), g = curve.g(), dg = curve.dg();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out << fmt17(y[i]) << ',' << fmt17(g[i]) << ',' << fmt17(dg[i]) << '\n';
    }
    auto side = detail::open_out(sidecar_path(csv));
    side << to_json(meta).dump(2) << '\n';
}

inline CurveSidecar read_sidecar(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw ResourceError("cannot open sidecar " + json_path.string());
    nlohmann::json j;
    try {
        in >> j;
        CurveSidecar s;
        s.p = j.at("p").get<double>();
        s.epsilon = j.at("epsilon").get<double>();
        s.g_mid = j.at("g_mid").get<double>();
        s.gamma = j.at("gamma").get<double>();
        s.left_residual = j.value("left_residual", 0.0);
        s.right_residual = j.value("right_residual", 0.0);
        s.threshold_slope = j.value("threshold_slope", 0.0);
        s.ambiguous = j.value("ambiguous", false);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("malformed sidecar " + json_path.string() + ": " + e.what());
    }
}

struct LoadedCurve {
    GCurve curve;
    CurveSidecar meta;
};

/// Reads a curve CSV and its sidecar; the sidecar supplies p and epsilon.
inline LoadedCurve read_curve(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    if (!in) throw ResourceError("cannot open curve file " + csv.string());
    LoadedCurve out;
    out.meta = read_sidecar(sidecar_path(csv));
    std::string line;
    std::getline(in, line);
    if (line != "y,g,dg") throw UsageError(csv.string() + ": expected header 'y,g,dg'");
    std::vector<double> ys, gs, dgs;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
            throw UsageError(csv.string() + ": row " + std::to_string(row) + " needs three fields");
        }
        const std::string where = csv.string() + ":" + std::to_string(row);
        ys.push_back(detail::parse_double(a, where));
        gs.push_back(detail::parse_double(b, where));
        dgs.push_back(detail::parse_double(c, where));
    }
    out.curve = GCurve(out.meta.p, out.meta.epsilon, std::move(ys), std::move(gs), std::move(dgs));
    return out;
}

inline void write_profile(const std::filesystem::path& csv, const std::vector<ProfilePoint>& rows) {
    auto out = detail::open_out(csv);
    out << "y,g_dp\n";
    for (const auto& r : rows) out << fmt17(r.y) << ',' << fmt17(r.g) << '\n';
}

/// `t,W,M,u,X,cost_running`; the last row carries u = 0 by convention.
inline void write_path(std::ostream& out, const SimPath& path) {
    out << "t,W,M,u,X,cost_running\n";
    for (std::size_t k = 0; k <= path.n_steps; ++k) {
        const double u = k < path.n_steps ? path.u[k] : 0.0;
        out << fmt17(path.times[k]) << ',' << fmt17(path.W[k]) << ',' << fmt17(path.M[k]) << ','
            << fmt17(u) << ',' << fmt17(path.X[k]) << ',' << fmt17(path.cost[k]) << '\n';
    }
}

inline void write_path(const std::filesystem::path& csv, const SimPath& path) {
    auto out = detail::open_out(csv);
    write_path(out, path);
}

struct WitnessRow {
    DualityWitness witness;
    double duality_gap = 0.0;
};

inline void write_witnesses(std::ostream& out, const std::vector<WitnessRow>& rows) {
    out << "n,I_n,mass,entropy,duality_gap\n";
    for (const auto& r : rows) {
        out << r.witness.n << ',' << fmt17(r.witness.I_n) << ',' << fmt17(r.witness.mass) << ','
            << fmt17(r.witness.entropy) << ',' << fmt17(r.duality_gap) << '\n';
    }
}

}  // namespace targetcost
