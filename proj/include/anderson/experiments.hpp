#pragma once

// Experiment orchestration shared by the CLI and the test suite: parse a
// validated key-value config, run one experiment, emit result files
// atomically with provenance.

#include <iostream>
#include <map>
#include <string>

#include "anderson/config.hpp"
#include "anderson/greens.hpp"
#include "anderson/io.hpp"
#include "anderson/stats.hpp"

namespace anderson {
namespace cli {

// Exit codes per the external contract.
enum ExitCode { kOk = 0, kConfigError = 2, kNumericGuard = 3, kQuadratureFlag = 4 };

inline HurstIndex make_hurst(double v) {
    try {
        return HurstIndex(v);
    } catch (const std::invalid_argument& e) {
        throw cfg::ConfigError("EHURST", e.what());
    }
}

inline SpaceTimeGrid make_grid(const cfg::KeyValues& kv) {
    try {
        return SpaceTimeGrid(kv.get_double("T", 1.0), int(kv.get_long("n_t", 256)),
                             kv.get_double("L", 4.0), int(kv.get_long("n_x", 1024)),
                             int(kv.get_long("n_xi", 0)), kv.get_double("xi_max", 0.0));
    } catch (const std::invalid_argument& e) {
        throw cfg::ConfigError("EGRID", e.what());
    }
}

inline stats::IteratePolicy make_policy(const cfg::KeyValues& kv) {
    stats::IteratePolicy p;
    const std::string mode = kv.get_string("policy", "fixed_point");
    if (mode == "fixed_point") {
        p.kind = stats::IteratePolicy::Kind::fixed_point;
    } else if (mode == "iterates") {
        p.kind = stats::IteratePolicy::Kind::fixed_iterates;
        p.m = int(kv.get_long("iterates", 2));
    } else if (mode == "tolerance") {
        p.kind = stats::IteratePolicy::Kind::to_tolerance;
        p.tol = kv.get_double("tolerance", 1e-8);
    } else {
        throw cfg::ConfigError("ECONFIG", "policy must be fixed_point | iterates | tolerance");
    }
    return p;
}

struct RunContext {
    uint64_t seed = 1;
    int threads = 1;
    std::string out_path;
    std::string format = "csv";  // csv | json
    std::ostream* log = &std::cout;
};

inline io::Provenance base_provenance(const RunContext& ctx, const cfg::KeyValues& kv,
                                      const std::string& experiment) {
    io::Provenance prov;
    prov.add("experiment", experiment);
    prov.add("seed", ctx.seed);
    prov.add("threads", long(ctx.threads));
    for (const auto& item : kv.values) prov.add("cfg." + item.first, item.second);
    return prov;
}

inline void emit(const RunContext& ctx, const io::Provenance& prov, const std::string& csv,
                 const std::string& json_rows) {
    if (ctx.format == "json") {
        std::string out = "{\n  \"provenance\": " + prov.json_object() +
                          ",\n  \"rows\": " + json_rows + "\n}\n";
        io::atomic_write(ctx.out_path, out);
    } else {
        io::atomic_write(ctx.out_path, csv);
    }
}

// ---- individual experiments -------------------------------------------------

inline int run_constants(const cfg::KeyValues& kv, const RunContext& ctx) {
    const std::vector<double> alphas = kv.get_list("alphas", {-0.5, -0.2, 0.0, 0.2, 0.5});
    const std::vector<double> Ts = kv.get_list("T_values", {0.5, 1.0});
    kv.reject_unknown();
    io::Provenance prov = base_provenance(ctx, kv, "constants");
    io::CsvBuilder csv(prov, {"kind", "alpha", "T", "A_T", "C_alpha"});
    std::string json = "[";
    bool first = true;
    for (EquationKind kind : {EquationKind::wave, EquationKind::heat})
        for (double a : alphas)
            for (double T : Ts) {
                const double A = greens::spectral_energy(kind, a, T);
                const double C = greens::lemma_constant(a);
                csv.row(kind_name(kind), a, T, A, C);
                if (!first) json += ", ";
                first = false;
                json += "[\"" + std::string(kind_name(kind)) + "\", " + std::to_string(a) +
                        ", " + std::to_string(T) + ", " + std::to_string(A) + ", " +
                        std::to_string(C) + "]";
            }
    json += "]";
    emit(ctx, prov, csv.str(), json);
    *ctx.log << "constants: wrote " << ctx.out_path << "\n";
    return kOk;
}

inline int run_covariance(const cfg::KeyValues& kv, const RunContext& ctx) {
    SpaceTimeGrid g = make_grid(kv);
    const std::vector<double> Hs = kv.get_list("H", {0.3, 0.5, 0.75});
    const std::vector<double> pt = kv.get_list("probe_t", {1.0, 1.0, 0.5, 1.0});
    const std::vector<double> px = kv.get_list("probe_x", {1.0, -1.0, 1.0, 0.5});
    const int replicates = int(kv.get_long("replicates", 10000));
    kv.reject_unknown();
    if (pt.size() != px.size())
        throw cfg::ConfigError("ECONFIG", "probe_t and probe_x must have equal length");
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < pt.size(); ++i) pts.emplace_back(pt[i], px[i]);
    io::Provenance prov = base_provenance(ctx, kv, "covariance");
    io::CsvBuilder csv(prov, {"H", "t_i", "x_i", "t_j", "x_j", "empirical", "closed", "se"});
    std::string json = "[";
    bool first = true;
    for (double hv : Hs) {
        const HurstIndex H = make_hurst(hv);
        const noise::CovarianceReport rep =
            noise::empirical_covariance(g, H, pts, replicates, ctx.seed);
        const int P = int(pts.size());
        for (int i = 0; i < P; ++i)
            for (int j = i; j < P; ++j) {
                const double closed = noise::covariance_closed_form(
                    H, pts[i].first, pts[i].second, pts[j].first, pts[j].second);
                csv.row(hv, pts[i].first, pts[i].second, pts[j].first, pts[j].second,
                        rep.cov[size_t(i) * P + j], closed, rep.se[size_t(i) * P + j]);
                if (!first) json += ", ";
                first = false;
                json += "[" + std::to_string(hv) + ", " + std::to_string(rep.cov[size_t(i) * P + j]) +
                        ", " + std::to_string(closed) + "]";
            }
    }
    json += "]";
    emit(ctx, prov, csv.str(), json);
    *ctx.log << "covariance: wrote " << ctx.out_path << "\n";
    return kOk;
}

inline int run_chaos_table(const cfg::KeyValues& kv, const RunContext& ctx) {
    const std::string kind_s = kv.get_string("kind", "wave");
    const std::vector<double> Hs = kv.get_list("H", {0.3, 0.5, 0.75});
    const long orders = kv.get_long("orders", 2);
    const double t = kv.get_double("t", 1.0);
    const double eta = kv.get_double("eta", 1.0);
    const long samples = kv.get_long("samples", 200000);
    kv.reject_unknown();
    const EquationKind kind = kind_from_name(kind_s);
    io::Provenance prov = base_provenance(ctx, kv, "chaos-table");
    io::CsvBuilder csv(prov, {"kind", "H", "n", "t", "value", "se", "samples"});
    std::string json = "[";
    bool first = true;
    bool flagged = false;
    for (double hv : Hs) {
        const HurstIndex H = make_hurst(hv);
        for (int n = 1; n <= orders; ++n) {
            chaos::QuadratureBudget budget;
            budget.samples = samples;
            budget.seed = ctx.seed + uint64_t(n) * 7919u;
            const chaos::QuadratureEstimate e =
                chaos::chaos_second_moment(kind, H, n, t, eta, budget);
            flagged = flagged || e.flagged;
            csv.row(kind_s, hv, n, t, e.value, e.se, e.samples);
            if (!first) json += ", ";
            first = false;
            json += "[" + std::to_string(hv) + ", " + std::to_string(n) + ", " +
                    std::to_string(e.value) + ", " + std::to_string(e.se) + "]";
        }
    }
    json += "]";
    emit(ctx, prov, csv.str(), json);
    *ctx.log << "chaos-table: wrote " << ctx.out_path << (flagged ? " (EQUAD: flagged rows)" : "")
             << "\n";
    return flagged ? kQuadratureFlag : kOk;
}

inline int run_solve(const cfg::KeyValues& kv, const RunContext& ctx) {
    SpaceTimeGrid g = make_grid(kv);
    const EquationKind kind = kind_from_name(kv.get_string("kind", "wave"));
    const HurstIndex H = make_hurst(kv.get_double("H", 0.5));
    const double eta = kv.get_double("eta", 1.0);
    const stats::IteratePolicy policy = make_policy(kv);
    const bool binary = kv.get_long("binary", 0) != 0;
    const long tstride = kv.get_long("time_stride", 8);
    const long xstride = kv.get_long("space_stride", 8);
    kv.reject_unknown();
    const solver::SolutionField u = stats::realize(g, kind, H, eta, ctx.seed, policy);
    if (binary) {
        solver::write_solution_field(ctx.out_path, u);
    } else {
        io::Provenance prov = base_provenance(ctx, kv, "solve");
        prov.add("iterate", long(u.iterate));
        std::ostringstream os;
        os.precision(12);
        os << prov.csv_header();
        solver::write_solution_csv(os, u, int(tstride), int(xstride));
        io::atomic_write(ctx.out_path, os.str());
    }
    *ctx.log << "solve: wrote " << ctx.out_path << "\n";
    return kOk;
}

inline int run_holder(const cfg::KeyValues& kv, const RunContext& ctx) {
    SpaceTimeGrid g = make_grid(kv);
    const EquationKind kind = kind_from_name(kv.get_string("kind", "wave"));
    const HurstIndex H = make_hurst(kv.get_double("H", 0.5));
    const double eta = kv.get_double("eta", 1.0);
    const std::string dir_s = kv.get_string("direction", "space");
    const double base_t = kv.get_double("base_t", g.T);
    const double base_x = kv.get_double("base_x", 0.0);
    const std::vector<double> lags = kv.get_list("lags", {});
    const int replicates = int(kv.get_long("replicates", 2000));
    const stats::IteratePolicy policy = make_policy(kv);
    kv.reject_unknown();
    const stats::Direction dir =
        dir_s == "time" ? stats::Direction::time : stats::Direction::space;
    const stats::HolderFit fit = stats::holder_fit(g, kind, H, eta, dir, base_t, base_x,
                                                   lags, replicates, ctx.seed, policy,
                                                   ctx.threads);
    io::Provenance prov = base_provenance(ctx, kv, "holder");
    prov.add("slope", fit.slope);
    prov.add("slope_se", fit.slope_se);
    prov.add("intercept", fit.intercept);
    io::CsvBuilder csv(prov, {"direction", "lag", "moment", "se", "slope", "slope_se"});
    std::string json = "[";
    for (size_t i = 0; i < fit.lags.size(); ++i) {
        csv.row(dir_s, fit.lags[i], fit.moments[i], fit.se[i], fit.slope, fit.slope_se);
        json += (i ? ", [" : "[") + std::to_string(fit.lags[i]) + ", " +
                std::to_string(fit.moments[i]) + "]";
    }
    json += "]";
    emit(ctx, prov, csv.str(), json);
    *ctx.log << "holder: slope=" << fit.slope << " wrote " << ctx.out_path << "\n";
    return kOk;
}

inline int run_coupling(const cfg::KeyValues& kv, const RunContext& ctx) {
    SpaceTimeGrid g = make_grid(kv);
    const EquationKind kind = kind_from_name(kv.get_string("kind", "wave"));
    const double H0 = kv.get_double("H0", 0.5);
    const std::vector<double> H_list = kv.get_list("H_list", {0.35, 0.4, 0.45, 0.48});
    const double eta = kv.get_double("eta", 1.0);
    const double pt = kv.get_double("probe_t", 1.0);
    const double px = kv.get_double("probe_x", 0.0);
    const int replicates = int(kv.get_long("replicates", 2000));
    const stats::IteratePolicy policy = make_policy(kv);
    kv.reject_unknown();
    make_hurst(H0);
    for (double h : H_list) make_hurst(h);
    const stats::CouplingCurve curve = stats::coupling_curve(
        g, kind, H0, H_list, eta, {pt, px}, replicates, ctx.seed, policy, ctx.threads);
    io::Provenance prov = base_provenance(ctx, kv, "coupling");
    io::CsvBuilder csv(prov, {"H_n", "gap", "se"});
    std::string json = "[";
    for (size_t i = 0; i < curve.H_n.size(); ++i) {
        csv.row(curve.H_n[i], curve.gap[i], curve.se[i]);
        json += (i ? ", [" : "[") + std::to_string(curve.H_n[i]) + ", " +
                std::to_string(curve.gap[i]) + ", " + std::to_string(curve.se[i]) + "]";
    }
    json += "]";
    emit(ctx, prov, csv.str(), json);
    *ctx.log << "coupling: wrote " << ctx.out_path << "\n";
    return kOk;
}

inline int run_ks(const cfg::KeyValues& kv, const RunContext& ctx) {
    SpaceTimeGrid g = make_grid(kv);
    const EquationKind kind = kind_from_name(kv.get_string("kind", "heat"));
    const HurstIndex Ha = make_hurst(kv.get_double("H_a", 0.3));
    const HurstIndex Hb = make_hurst(kv.get_double("H_b", 0.7));
    const double eta = kv.get_double("eta", 1.0);
    const double pt = kv.get_double("probe_t", 1.0);
    const double px = kv.get_double("probe_x", 0.0);
    const int samples = int(kv.get_long("samples", 1000));
    const int trials = int(kv.get_long("trials", 20));
    const stats::IteratePolicy policy = make_policy(kv);
    kv.reject_unknown();
    io::Provenance prov = base_provenance(ctx, kv, "ks");
    io::CsvBuilder csv(prov, {"trial", "statistic", "p_value"});
    std::string json = "[";
    int rejected = 0;
    for (int tr = 0; tr < trials; ++tr) {
        const uint64_t sa = replicate_seed(ctx.seed, uint64_t(2 * tr));
        const uint64_t sb = replicate_seed(ctx.seed, uint64_t(2 * tr + 1));
        const auto A =
            stats::marginal_samples(g, kind, Ha, eta, {pt, px}, samples, sa, policy, ctx.threads);
        const auto B =
            stats::marginal_samples(g, kind, Hb, eta, {pt, px}, samples, sb, policy, ctx.threads);
        const stats::KsResult res = stats::ks_distance(A, B);
        if (res.p_value < 0.01) ++rejected;
        csv.row(tr, res.statistic, res.p_value);
        json += (tr ? ", [" : "[") + std::to_string(res.statistic) + ", " +
                std::to_string(res.p_value) + "]";
    }
    json += "]";
    emit(ctx, prov, csv.str(), json);
    *ctx.log << "ks: rejected " << rejected << "/" << trials << " at p<0.01, wrote "
             << ctx.out_path << "\n";
    return kOk;
}

inline int run_tightness(const cfg::KeyValues& kv, const RunContext& ctx) {
    SpaceTimeGrid g = make_grid(kv);
    const EquationKind kind = kind_from_name(kv.get_string("kind", "wave"));
    const std::vector<double> Hs = kv.get_list("H", {0.35, 0.45});
    const double eta = kv.get_double("eta", 1.0);
    const int p = int(kv.get_long("p", 8));
    const std::vector<double> pdt = kv.get_list("pair_dt_cells", {8, 16, 0, 0, 8});
    const std::vector<double> pdx = kv.get_list("pair_dx_cells", {0, 0, 8, 16, 8});
    const int replicates = int(kv.get_long("replicates", 4000));
    const stats::IteratePolicy policy = make_policy(kv);
    kv.reject_unknown();
    if (pdt.size() != pdx.size())
        throw cfg::ConfigError("ECONFIG", "pair_dt_cells and pair_dx_cells must match");
    for (double h : Hs) make_hurst(h);
    std::vector<std::pair<int, int>> pairs;
    for (size_t i = 0; i < pdt.size(); ++i) pairs.emplace_back(int(pdt[i]), int(pdx[i]));
    const stats::TightnessProbe probe = stats::tightness_probe(
        g, kind, Hs, eta, p, pairs, replicates, ctx.seed, policy, ctx.threads);
    io::Provenance prov = base_provenance(ctx, kv, "tightness");
    prov.add("delta", probe.delta);
    prov.add("status", probe.status);
    io::CsvBuilder csv(prov, {"H", "pair_dt", "pair_dx", "ratio", "sup_ratio", "status"});
    std::string json = "[";
    bool first = true;
    for (size_t hi = 0; hi < probe.H_grid.size() && hi < probe.ratios.size(); ++hi)
        for (size_t q = 0; q < pairs.size(); ++q) {
            csv.row(probe.H_grid[hi], pairs[q].first * g.dt, pairs[q].second * g.dx,
                    probe.ratios[hi][q], probe.sup_ratio[hi], probe.status);
            if (!first) json += ", ";
            first = false;
            json += "[" + std::to_string(probe.H_grid[hi]) + ", " +
                    std::to_string(probe.ratios[hi][q]) + "]";
        }
    json += "]";
    emit(ctx, prov, csv.str(), json);
    *ctx.log << "tightness: status=" << probe.status << " wrote " << ctx.out_path << "\n";
    return kOk;
}

// Dispatch by experiment name; `kv` must already contain any CLI overrides.
inline int run_experiment(const std::string& name, const cfg::KeyValues& kv,
                          const RunContext& ctx) {
    if (name == "constants") return run_constants(kv, ctx);
    if (name == "covariance") return run_covariance(kv, ctx);
    if (name == "chaos-table") return run_chaos_table(kv, ctx);
    if (name == "solve") return run_solve(kv, ctx);
    if (name == "holder") return run_holder(kv, ctx);
    if (name == "coupling") return run_coupling(kv, ctx);
    if (name == "ks") return run_ks(kv, ctx);
    if (name == "tightness") return run_tightness(kv, ctx);
    throw cfg::ConfigError("ECONFIG", "unknown experiment: " + name);
}

}  // namespace cli
}  // namespace anderson
