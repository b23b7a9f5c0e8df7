#include "catwalk/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "catwalk/chains.hpp"
#include "catwalk/coupling.hpp"
#include "catwalk/errors.hpp"
#include "catwalk/invariance.hpp"
#include "catwalk/parallel.hpp"
#include "catwalk/report.hpp"
#include "catwalk/rng.hpp"
#include "catwalk/scaling.hpp"

namespace catwalk
{
namespace
{
struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct Flags
{
    double p = 0.0;
    double c = 0.0;
    double alpha = 0.5;
    double gamma = 1.0;
    double r = 1.0;
    double y = 0.0;
    std::int64_t k = 0;
    std::vector<double> L;
    std::int64_t T = 50;
    std::int64_t steps = 0;
    std::int64_t x0 = 0;
    std::int64_t reps = 0;
    std::int64_t samples = 1'000'000;
    std::int64_t N = 200;
    std::uint64_t seed = 0;
    double M = 10.0;
    std::vector<double> t;
    std::vector<double> theta;
    std::string out;
    std::string format;
    int threads = 0;
    int prop = 0;
};

bool given(CLI::App const* app, char const* name)
{
    return app->count(name) > 0;
}

void add_output_flags(CLI::App* app, Flags& f)
{
    app->add_option("--seed", f.seed, "master seed (else $CATWALK_SEED, else default)");
    app->add_option("--out", f.out, "output file (default: stdout)");
    app->add_option("--format", f.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
}

class Runner
{
  public:
    Runner(Flags& flags, std::ostream& out) : f_(flags), out_(out) {}

    int simulate(CLI::App const* app, bool preset)
    {
        if (preset)
        {
            f_.p = 0.99;
            f_.c = 0.1;
            f_.x0 = 2000;
            f_.steps = 100'000;
        }
        RunConfig config = base(app, preset ? "figure1" : "simulate", "csv");
        ChainParams const params{f_.p, f_.c};
        validate(params);
        require(f_.x0 >= 0, "simulate: x0 must be >= 0");
        require(f_.steps >= 0, "simulate: steps must be >= 0");
        config.params = {{"p", f_.p}, {"c", f_.c}, {"x0", f_.x0}, {"steps", f_.steps}};
        SeedSpec const seed{config.seed, 0};

        std::ostringstream buf;
        if (config.format == "csv")
        {
            Stream stream(seed);
            std::string rows = "step,value\n";
            simulate_visit(ChainKind::X, params, f_.x0, f_.steps, stream,
                           [&](std::int64_t n, std::int64_t v) {
                               rows += std::to_string(n);
                               rows += ',';
                               rows += std::to_string(v);
                               rows += '\n';
                           });
            buf << rows;
        }
        else
        {
            double const level = metastable_level(params);
            auto const band_low = static_cast<std::int64_t>(std::floor(0.95 * level));
            auto const band_high = static_cast<std::int64_t>(std::ceil(1.05 * level));
            auto const summary = summarize_x(params, f_.x0, f_.steps, seed,
                                             f_.steps / 5, band_low, band_high);
            auto const path = catwalk::simulate(ChainKind::X, params, f_.x0, f_.steps, seed);
            Json result = {{"metastable_level", level},
                           {"band", {band_low, band_high}},
                           {"summary", to_json(summary)},
                           {"values", path.values}};
            buf << make_envelope(config, std::move(result), true).dump(2) << '\n';
        }
        emit(config, buf.str());
        return kExitOk;
    }

    int verify(CLI::App const* app)
    {
        RunConfig config = base(app, "verify", "json");
        std::ostringstream buf;
        bool pass = false;
        auto const json_out = config.format == "json";
        switch (f_.prop)
        {
            case 1:
            {
                default_value(app, "--p", f_.p, 0.5);
                default_list(app, "--L", f_.L, {100, 1000, 10000});
                default_value(app, "--reps", f_.reps, std::int64_t{2000});
                config.params = {{"prop", 1}, {"p", f_.p}, {"T", f_.T}, {"L", f_.L},
                                 {"reps", f_.reps}, {"M", f_.M}};
                auto const study
                    = verify_prop1(f_.p, f_.T, f_.L, f_.reps, config.seed, f_.M);
                pass = study.pass;
                if (json_out)
                {
                    buf << make_envelope(config, to_json(study), pass).dump(2) << '\n';
                }
                else
                {
                    write_csv(buf, study);
                }
                break;
            }
            case 2:
            {
                default_value(app, "--c", f_.c, 0.5);
                default_value(app, "--y", f_.y, 1.0);
                default_list(app, "--L", f_.L, {100, 1000, 10000});
                default_list(app, "--t", f_.t, {0.5, 1, 2});
                default_value(app, "--reps", f_.reps, std::int64_t{10000});
                config.params = {{"prop", 2}, {"c", f_.c}, {"y", f_.y}, {"L", f_.L},
                                 {"t", f_.t}, {"reps", f_.reps}};
                auto const report
                    = compare_prop2(f_.c, f_.y, f_.L, f_.t, f_.reps, config.seed);
                pass = report.pass;
                write(buf, config, report, pass);
                break;
            }
            case 3:
            {
                default_value(app, "--c", f_.c, 0.5);
                default_value(app, "--reps", f_.reps, std::int64_t{10000});
                default_list(app, "--t", f_.t, {1, 5});
                default_list(app, "--theta", f_.theta, {0.1, 1, 10});
                config.params = {{"prop", 3}, {"c", f_.c}, {"reps", f_.reps},
                                 {"t", f_.t}, {"theta", f_.theta}, {"N", f_.N},
                                 {"samples", f_.samples}};
                InvarianceOptions options;
                options.times = f_.t;
                options.thetas = f_.theta;
                options.laplace_terms = f_.N;
                options.mc_samples = f_.samples;
                auto const report
                    = verify_invariance(f_.c, f_.reps, config.seed, options);
                pass = report.pass;
                write(buf, config, report, pass);
                break;
            }
            case 4:
            {
                default_list(app, "--L", f_.L, {10000});
                default_list(app, "--t", f_.t, {1});
                default_value(app, "--reps", f_.reps, std::int64_t{10000});
                config.params = {{"prop", 4}, {"alpha", f_.alpha}, {"r", f_.r},
                                 {"y", f_.y}, {"L", f_.L}, {"t", f_.t},
                                 {"reps", f_.reps}};
                auto const report = compare_prop4(f_.alpha, f_.r, f_.y, f_.L, f_.t,
                                                  f_.reps, config.seed);
                pass = report.pass;
                write(buf, config, report, pass);
                break;
            }
            case 5:
            {
                default_list(app, "--L", f_.L, {10000});
                default_value(app, "--reps", f_.reps, std::int64_t{10000});
                require(f_.L.size() == 1, "verify 5 takes a single --L");
                config.params = {{"prop", 5}, {"gamma", f_.gamma}, {"r", f_.r},
                                 {"k", f_.k}, {"L", f_.L.front()}, {"reps", f_.reps}};
                auto const report = compare_prop5(f_.gamma, f_.r, f_.k, f_.L.front(),
                                                  f_.reps, config.seed);
                pass = report.pass;
                write(buf, config, report, pass);
                break;
            }
            default:
                throw CLI::ValidationError("prop", "unknown proposition "
                                                       + std::to_string(f_.prop));
        }
        emit(config, buf.str());
        return pass ? kExitOk : kExitFailed;
    }

    int invariant(CLI::App const* app)
    {
        RunConfig config = base(app, "invariant", "json");
        default_value(app, "--c", f_.c, 0.5);
        default_list(app, "--theta", f_.theta, {0.1, 1, 10});
        require(f_.c > 0.0 && f_.c <= 1.0, "invariant: c must lie in (0,1]");
        require(f_.N >= 1, "invariant: N must be >= 1");
        config.params = {{"c", f_.c}, {"theta", f_.theta}, {"N", f_.N},
                         {"samples", f_.samples}};
        auto const rows = laplace_table({f_.c}, f_.theta, f_.N);
        auto const moments = perpetuity_moment_check(
            f_.c, f_.samples, derive_seed(config.seed, "invariant/moments"));
        bool pass = moments.mean_pass && moments.variance_pass;
        Json table = Json::array();
        for (auto const& row : rows)
        {
            pass = pass && row.pass;
            table.push_back(to_json(row));
        }
        std::ostringstream buf;
        if (config.format == "json")
        {
            Json result = {{"laplace", table}, {"moments", to_json(moments)}};
            buf << make_envelope(config, std::move(result), pass).dump(2) << '\n';
        }
        else
        {
            write_csv(buf, rows);
        }
        emit(config, buf.str());
        return pass ? kExitOk : kExitFailed;
    }

  private:
    RunConfig base(CLI::App const* app, std::string command, char const* format)
    {
        if (given(app, "--threads"))
        {
            set_worker_count(f_.threads);
        }
        RunConfig config;
        config.command = std::move(command);
        config.seed = resolve_master_seed(given(app, "--seed") ? &f_.seed : nullptr);
        config.out = f_.out;
        config.format = f_.format.empty() ? format : f_.format;
        return config;
    }

    template<class T>
    static void default_value(CLI::App const* app, char const* name, T& v, T def)
    {
        if (!given(app, name))
        {
            v = def;
        }
    }

    static void default_list(CLI::App const* app,
                             char const* name,
                             std::vector<double>& v,
                             std::vector<double> def)
    {
        if (!given(app, name))
        {
            v = std::move(def);
        }
    }

    template<class Report>
    static void write(std::ostream& buf, RunConfig const& config, Report const& r, bool pass)
    {
        if (config.format == "json")
        {
            buf << make_envelope(config, to_json(r), pass).dump(2) << '\n';
        }
        else
        {
            write_csv(buf, r);
        }
    }

    void emit(RunConfig const& config, std::string const& text)
    {
        if (config.out.empty())
        {
            out_ << text;
            return;
        }
        std::ofstream file(config.out, std::ios::binary | std::ios::trunc);
        file << text;
        file.close();
        if (!file)
        {
            throw IoError("cannot write " + config.out);
        }
    }

    Flags& f_;
    std::ostream& out_;
};
}  // namespace

int run_cli(int argc, char const* const* argv, std::ostream& out, std::ostream& err)
{
    Flags f;
    CLI::App app{"Catastrophe random walk simulator and limit-theorem checks"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "simulate one X path");
    sim->add_option("--p", f.p, "birth probability")->required();
    sim->add_option("--c", f.c, "catastrophe thinning")->required();
    sim->add_option("--x0", f.x0, "initial state")->required();
    sim->add_option("--steps", f.steps, "number of steps")->required();
    add_output_flags(sim, f);

    auto* fig = app.add_subcommand("figure1", "p=0.99, c=0.1, X0=2000, 1e5 steps");
    add_output_flags(fig, f);

    auto* ver = app.add_subcommand("verify", "run a proposition check (1-5)");
    ver->add_option("prop", f.prop, "proposition number")->required();
    ver->add_option("--p", f.p, "birth probability");
    ver->add_option("--c", f.c, "catastrophe thinning");
    ver->add_option("--alpha", f.alpha, "P4 exponent")->capture_default_str();
    ver->add_option("--gamma", f.gamma, "P5 exponent")->capture_default_str();
    ver->add_option("--r", f.r, "centring level")->capture_default_str();
    ver->add_option("--y", f.y, "rescaled start");
    ver->add_option("--k", f.k, "P5 offset from floor(rL)")->capture_default_str();
    ver->add_option("--L", f.L, "scale grid")->delimiter(',');
    ver->add_option("--T", f.T, "horizon in steps")->capture_default_str();
    ver->add_option("--t", f.t, "rescaled times")->delimiter(',');
    ver->add_option("--theta", f.theta, "Laplace arguments")->delimiter(',');
    ver->add_option("--N", f.N, "Laplace product terms")->capture_default_str();
    ver->add_option("--reps", f.reps, "replicates");
    ver->add_option("--samples", f.samples, "large Monte Carlo sample")
        ->capture_default_str();
    ver->add_option("--M", f.M, "union-bound margin")->capture_default_str();
    add_output_flags(ver, f);

    auto* inv = app.add_subcommand("invariant", "Laplace product and perpetuity moments");
    inv->add_option("--c", f.c, "catastrophe thinning");
    inv->add_option("--theta", f.theta, "Laplace arguments")->delimiter(',');
    inv->add_option("--N", f.N, "product terms")->capture_default_str();
    inv->add_option("--samples", f.samples, "perpetuity samples")->capture_default_str();
    add_output_flags(inv, f);

    try
    {
        app.parse(argc, argv);
        Runner runner(f, out);
        if (*sim)
        {
            return runner.simulate(sim, false);
        }
        if (*fig)
        {
            return runner.simulate(fig, true);
        }
        if (*ver)
        {
            return runner.verify(ver);
        }
        return runner.invariant(inv);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e, out, err);
    }
    catch (CLI::Error const& e)
    {
        app.exit(e, out, err);
        return kExitUsage;
    }
    catch (IoError const& e)
    {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    catch (std::invalid_argument const& e)
    {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (std::exception const& e)
    {
        err << "error: " << e.what() << '\n';
        return kExitFailed;
    }
}
}  // namespace catwalk
