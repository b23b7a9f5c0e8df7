#include "catwalk/report.hpp"

#include <charconv>
#include <cmath>

namespace catwalk
{
namespace
{
Json optional_int(std::optional<std::int64_t> const& v)
{
    return v ? Json(*v) : Json(nullptr);
}

// JSON has no infinities; spell them out.
Json real(double v)
{
    if (std::isfinite(v))
    {
        return v;
    }
    if (std::isnan(v))
    {
        return "nan";
    }
    return v > 0 ? "inf" : "-inf";
}

Json to_json(CalibrationResult const& cal)
{
    Json counts = Json::array();
    for (auto const& [t, n] : cal.counts)
    {
        counts.push_back({{"t", t}, {"count", n}});
    }
    return {{"kind", cal.kind},         {"description", cal.description},
            {"trials", cal.trials},     {"required", cal.required},
            {"counts", counts},         {"ok", cal.ok}};
}

Json to_json(NamedCheck const& check)
{
    Json j = to_json(check.report);
    j["name"] = check.name;
    return j;
}
}  // namespace

std::string format_real(double value)
{
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

Json to_json(RunConfig const& config)
{
    return {{"command", config.command},
            {"params", config.params},
            {"seed", config.seed},
            {"out", config.out},
            {"format", config.format}};
}

Json to_json(DistanceReport const& r)
{
    return {{"statistic", r.statistic_name},
            {"value", real(r.value)},
            {"n1", r.n1},
            {"n2", r.n2},
            {"threshold", real(r.threshold)},
            {"pass", r.pass},
            {"notes", r.notes}};
}

Json to_json(Prop1Row const& row)
{
    return {{"L", row.L},
            {"p", row.p},
            {"T", row.T},
            {"reps", row.reps},
            {"x0", row.x0},
            {"discrepancies", row.discrepancies},
            {"discrepancies_xu", row.discrepancies_xu},
            {"discrepancies_uy", row.discrepancies_uy},
            {"u_escaped", row.u_escaped},
            {"p_hat", row.p_hat},
            {"ci_low", row.ci_low},
            {"ci_high", row.ci_high},
            {"ci_level", kProp1CiLevel},
            {"union_bound", real(row.union_bound)},
            {"M", row.margin_M}};
}

Json to_json(Prop1Study const& study)
{
    Json rows = Json::array();
    for (auto const& row : study.rows)
    {
        rows.push_back(to_json(row));
    }
    return {{"rows", rows},
            {"non_increasing", study.non_increasing},
            {"cap", study.cap},
            {"below_cap", study.below_cap},
            {"pass", study.pass}};
}

Json to_json(ComparisonReport const& report)
{
    Json params = Json::object();
    for (auto const& [k, v] : report.params)
    {
        params[k] = v;
    }
    Json table = Json::array();
    for (auto const& cell : report.ks_table)
    {
        Json j = to_json(cell.ks);
        j["L"] = cell.L;
        j["t"] = cell.t;
        j["wasserstein1"] = cell.wasserstein;
        table.push_back(std::move(j));
    }
    Json trends = Json::array();
    for (auto const& v : report.trends)
    {
        trends.push_back({{"t", v.t},
                          {"ks_by_L", v.ks_by_L},
                          {"tolerance", v.tolerance},
                          {"non_increasing", v.non_increasing}});
    }
    Json checks = Json::array();
    for (auto const& c : report.checks)
    {
        checks.push_back(to_json(c));
    }
    return {{"regime", report.regime},
            {"params", params},
            {"L_grid", report.L_grid},
            {"t_grid", report.t_grid},
            {"ks_table", table},
            {"trends", trends},
            {"null_calibration", report.null_calibration
                                     ? to_json(*report.null_calibration)
                                     : Json(nullptr)},
            {"power", report.power ? to_json(*report.power) : Json(nullptr)},
            {"checks", checks},
            {"pass", report.pass}};
}

Json to_json(Prop5Report const& r)
{
    return {{"gamma", r.gamma},
            {"r", r.r},
            {"k", r.k},
            {"L", r.L},
            {"reps", r.reps},
            {"x0", r.x0},
            {"censored", r.censored},
            {"holding_ks", to_json(r.holding_ks)},
            {"right_jumps", r.right_jumps},
            {"left_jumps", r.left_jumps},
            {"big_left_jumps", r.big_left_jumps},
            {"right_frequency", r.right_frequency},
            {"right_ci_low", r.right_ci_low},
            {"right_ci_high", r.right_ci_high},
            {"right_ci_level", kProp5CiLevel},
            {"right_expected", r.right_expected},
            {"right_pass", r.right_pass},
            {"big_left_frequency", r.big_left_frequency},
            {"big_left_bound", r.big_left_bound},
            {"big_left_threshold", r.big_left_threshold},
            {"big_left_pass", r.big_left_pass},
            {"two_clock_ks", to_json(r.two_clock_ks)},
            {"pass", r.pass}};
}

Json to_json(LaplaceRow const& row)
{
    return {{"c", row.c},
            {"theta", row.theta},
            {"terms", row.terms},
            {"phi", row.phi},
            {"residual", row.residual},
            {"truncation_bound", real(row.truncation_bound)},
            {"pass", row.pass}};
}

Json to_json(MomentCheck const& m)
{
    return {{"c", m.c},
            {"samples", m.samples},
            {"mean", m.mean},
            {"mean_stderr", m.mean_stderr},
            {"expected_mean", m.expected_mean},
            {"mean_pass", m.mean_pass},
            {"variance", m.variance},
            {"variance_stderr", m.variance_stderr},
            {"expected_variance", m.expected_variance},
            {"variance_pass", m.variance_pass}};
}

Json to_json(InvarianceReport const& report)
{
    Json laplace = Json::array();
    for (auto const& row : report.laplace)
    {
        laplace.push_back(to_json(row));
    }
    Json checks = Json::array();
    for (auto const& c : report.checks)
    {
        checks.push_back(to_json(c));
    }
    return {{"c", report.c},
            {"reps", report.reps},
            {"laplace", laplace},
            {"moments", to_json(report.moments)},
            {"checks", checks},
            {"pass", report.pass}};
}

Json to_json(PathSummary const& s)
{
    return {{"steps", s.steps},
            {"min", s.min_value},
            {"max", s.max_value},
            {"final", s.final_value},
            {"window_begin", s.window_begin},
            {"window_mean", s.window_mean},
            {"first_band_entry", optional_int(s.first_band_entry)},
            {"absorption_step", optional_int(s.absorption_step)}};
}

Json make_envelope(RunConfig const& config, Json result, bool pass)
{
    return {{"version", kVersion},
            {"schema", kSchemaVersion},
            {"config", to_json(config)},
            {"result", std::move(result)},
            {"pass", pass}};
}

void write_path_csv(std::ostream& out, DiscretePath const& path)
{
    std::string buf = "step,value\n";
    for (std::size_t n = 0; n < path.values.size(); ++n)
    {
        buf += std::to_string(n);
        buf += ',';
        buf += std::to_string(path.values[n]);
        buf += '\n';
    }
    out << buf;
}

void write_cadlag_csv(std::ostream& out, CadlagPath const& path)
{
    out << "time,value,kind\n";
    out << "0," << format_real(path.initial_value) << ",interp\n";
    for (std::size_t i = 0; i < path.jump_times.size(); ++i)
    {
        out << format_real(path.jump_times[i]) << ','
            << format_real(path.pre_jump_values[i]) << ",pre\n";
        out << format_real(path.jump_times[i]) << ','
            << format_real(path.post_jump_values[i]) << ",post\n";
    }
    out << format_real(path.horizon) << ',' << format_real(path.value_at(path.horizon))
        << ",interp\n";
}

void write_csv(std::ostream& out, Prop1Study const& study)
{
    out << "L,p,T,reps,p_hat,ci_low,ci_high,union_bound\n";
    for (auto const& r : study.rows)
    {
        out << format_real(r.L) << ',' << format_real(r.p) << ',' << r.T << ','
            << r.reps << ',' << format_real(r.p_hat) << ',' << format_real(r.ci_low)
            << ',' << format_real(r.ci_high) << ',' << format_real(r.union_bound)
            << '\n';
    }
}

void write_csv(std::ostream& out, ComparisonReport const& report)
{
    out << "L,t,ks,threshold,pass,wasserstein1\n";
    for (auto const& cell : report.ks_table)
    {
        out << format_real(cell.L) << ',' << format_real(cell.t) << ','
            << format_real(cell.ks.value) << ',' << format_real(cell.ks.threshold)
            << ',' << (cell.ks.pass ? 1 : 0) << ',' << format_real(cell.wasserstein)
            << '\n';
    }
}

void write_csv(std::ostream& out, Prop5Report const& r)
{
    out << "gamma,r,k,L,reps,holding_ks,holding_threshold,right_frequency,"
           "right_ci_low,right_ci_high,big_left_frequency,big_left_threshold,pass\n";
    out << format_real(r.gamma) << ',' << format_real(r.r) << ',' << r.k << ','
        << format_real(r.L) << ',' << r.reps << ',' << format_real(r.holding_ks.value)
        << ',' << format_real(r.holding_ks.threshold) << ','
        << format_real(r.right_frequency) << ',' << format_real(r.right_ci_low) << ','
        << format_real(r.right_ci_high) << ',' << format_real(r.big_left_frequency)
        << ',' << format_real(r.big_left_threshold) << ',' << (r.pass ? 1 : 0) << '\n';
}

void write_csv(std::ostream& out, InvarianceReport const& report)
{
    out << "check,value,threshold,pass\n";
    for (std::size_t i = 0; i < report.checks.size(); ++i)
    {
        auto const& r = report.checks[i].report;
        out << i << ',' << format_real(r.value) << ',' << format_real(r.threshold)
            << ',' << (r.pass ? 1 : 0) << '\n';
    }
}

void write_csv(std::ostream& out, std::vector<LaplaceRow> const& rows)
{
    out << "c,theta,terms,phi,residual,truncation_bound\n";
    for (auto const& r : rows)
    {
        out << format_real(r.c) << ',' << format_real(r.theta) << ',' << r.terms << ','
            << format_real(r.phi) << ',' << format_real(r.residual) << ','
            << format_real(r.truncation_bound) << '\n';
    }
}
}  // namespace catwalk
