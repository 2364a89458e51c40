#include <hjmm/io.hpp>

#include <hjmm/error.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace hjmm {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

std::string field_csv(const RateField& field, const GridSpec& grid, Parametrization p) {
    std::string out = p == Parametrization::Standard ? "t,T,f\n" : "t,x,r\n";
    for (Eigen::Index i = 0; i < field.rows(); ++i) {
        for (Eigen::Index j = i; j < field.cols(); ++j) {
            const double second = p == Parametrization::Standard ? grid.time(j) : grid.time(j - i);
            out += format_number(grid.time(i)) + ',' + format_number(second) + ',' + format_number(field(i, j)) + '\n';
        }
    }
    return out;
}

std::string martingale_csv(const MartingaleReport& rep) {
    std::string out = "t,T,reference,mean,stddev,z,cv_mean,cv_stderr\n";
    for (const auto& s : rep.stats) {
        for (double v : {s.at.t, s.at.maturity, s.reference, s.mean, s.stddev, s.z, s.cv_mean})
            out += format_number(v) + ',';
        out += format_number(s.cv_stderr) + '\n';
    }
    return out;
}

json to_json(const GrowthClassification& g) {
    json out{{"verdict", to_string(g.verdict)}, {"rule_fired", to_string(g.rule_fired)}, {"notes", g.notes}};
    out["rho"] = g.rho ? json(std::isinf(*g.rho) ? json("inf") : json(*g.rho)) : json(nullptr);
    out["rho_band"] = g.rho_band ? json::array({g.rho_band->first, g.rho_band->second}) : json(nullptr);
    return out;
}

json to_json(const AssumptionReport& r) {
    json checks = json::array();
    for (const auto* c : {&r.a1, &r.a2, &r.a3, &r.a4})
        checks.push_back({{"label", c->label}, {"evaluated", c->evaluated}, {"passed", c->passed}, {"detail", c->detail}});
    return {{"checks", checks},
            {"support_infimum", r.support_infimum},
            {"a4_small_jumps", r.a4_small_jumps},
            {"a4_large_jumps", r.a4_large_jumps},
            {"second_moment", r.second_moment},
            {"second_moment_finite", r.second_moment_finite}};
}

json to_json(const SolverReport& r) {
    return {{"status", to_string(r.status)},
            {"iterations", r.iterations},
            {"sup_norm_trace", r.sup_norm_trace},
            {"l2_gamma_trace", r.l2_gamma_trace},
            {"h1_gamma_trace", r.h1_gamma_trace},
            {"min_increment_trace", r.min_increment_trace},
            {"difference_trace", r.difference_trace},
            {"c1_bound", r.c1_bound ? json(*r.c1_bound) : json(nullptr)}};
}

json to_json(const JumpPath& p) {
    json times = json::array(), sizes = json::array();
    for (const auto& j : p.jumps) {
        times.push_back(j.time);
        sizes.push_back(j.size);
    }
    return {{"horizon", p.horizon},         {"drift_rate", p.drift_rate}, {"seed", p.seed},
            {"truncation_eps", p.truncation_eps}, {"times", times},          {"sizes", sizes}};
}

json to_json(const MartingaleReport& r) {
    json stats = json::array();
    for (const auto& s : r.stats)
        stats.push_back({{"t", s.at.t},
                         {"T", s.at.maturity},
                         {"reference", s.reference},
                         {"mean", s.mean},
                         {"stddev", s.stddev},
                         {"z", s.z},
                         {"zero_variance", s.zero_variance},
                         {"cv_mean", s.cv_mean},
                         {"cv_stderr", s.cv_stderr},
                         {"bias", s.bias()}});
    return {{"n_paths", r.n_paths},
            {"excluded", r.excluded},
            {"exclusion_fraction", r.exclusion_fraction()},
            {"degenerate", r.degenerate},
            {"max_abs_z", r.max_abs_z},
            {"mean_abs_deviation", r.mean_abs_deviation},
            {"mean_abs_raw_deviation", r.mean_abs_raw_deviation},
            {"checkpoints", stats}};
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    out << text;
}

}  // namespace hjmm
