#include "sisdecay/cli.hpp"

#include "sisdecay/chain.hpp"
#include "sisdecay/decay.hpp"
#include "sisdecay/errors.hpp"
#include "sisdecay/oracle.hpp"
#include "sisdecay/sis.hpp"
#include "sisdecay/validate.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace sisdecay {

namespace {

using json = nlohmann::ordered_json;

struct CommonFlags {
    unsigned n = 0;
    std::string beta;
    std::string delta = "1";
    std::string eps = "0";
    std::string tau;
    std::string x;
    unsigned precision_bits = 0;
    bool exact = false;
    std::string format;
    std::string out;
    std::uint64_t seed = 1;
    std::uint64_t runs = 10000;
};

void add_rate_flags(CLI::App* cmd, CommonFlags& f, bool need_n) {
    auto* n = cmd->add_option("--n", f.n, "number of nodes N");
    if (need_n) n->required();
    auto* beta = cmd->add_option("--beta", f.beta, "infection rate per link (default 1)");
    cmd->add_option("--delta", f.delta, "curing rate")->capture_default_str();
    cmd->add_option("--eps", f.eps, "self-infection rate")->capture_default_str();
    auto* tau = cmd->add_option("--tau", f.tau, "effective infection rate beta/delta");
    auto* x = cmd->add_option("--x", f.x, "N tau");
    tau->excludes(x);
    beta->excludes(tau);
    beta->excludes(x);
}

void add_output_flags(CLI::App* cmd, CommonFlags& f, const std::string& default_format) {
    f.format = default_format;
    cmd->add_option("--precision-bits", f.precision_bits, "MPFR mantissa bits (0: automatic)");
    cmd->add_flag("--exact", f.exact, "print rationals as p/q and reals at full precision");
    cmd->add_option("--format", f.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", f.out, "write to PATH instead of stdout");
}

EpsSisParams make_params(const CommonFlags& f) {
    if (f.n == 0) throw Error(ErrorKind::InvalidParameter, "--n must be at least 1");
    const Rational delta = parse_rational(f.delta);
    const Rational eps = parse_rational(f.eps);
    if (!f.tau.empty()) return EpsSisParams::from_tau(f.n, parse_rational(f.tau), delta, eps);
    if (!f.x.empty()) return EpsSisParams::from_x(f.n, parse_rational(f.x), delta, eps);
    const Rational beta = f.beta.empty() ? Rational(1) : parse_rational(f.beta);
    return EpsSisParams::make(f.n, beta, delta, eps);
}

// The ladder whose zeta is reported: irreducible for eps > 0, restricted to
// the transient states for eps = 0.
RateLadder decay_ladder(const EpsSisParams& params) {
    auto ladder = build_eps_sis_ladder(params);
    return params.eps == 0 ? restrict_transient(ladder) : ladder;
}

unsigned pick_precision(const CommonFlags& f, unsigned n, const Rational& x) {
    return f.precision_bits ? f.precision_bits : required_precision(n, x.convert_to<double>());
}

std::string real_text(const Real& v, bool exact) {
    if (exact) return v.str(0, std::ios_base::scientific);
    return format_decimal(v, 17);
}

std::string rational_text(const Rational& q, bool exact) {
    return exact ? format_rational(q) : format_decimal(q.convert_to<double>(), 17);
}

json real_json(const Real& v, bool exact) {
    if (exact) return real_text(v, true);
    const double d = v.convert_to<double>();
    if (std::isfinite(d)) return d;
    return format_decimal(v, 17);
}

json rational_json(const Rational& q, bool exact) {
    if (exact) return format_rational(q);
    return q.convert_to<double>();
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorKind::InvalidParameter, "cannot open " + path);
    file << text;
}

json params_json(const EpsSisParams& p, bool exact) {
    return {{"n", p.n},
            {"beta", rational_json(p.beta, exact)},
            {"delta", rational_json(p.delta, exact)},
            {"eps", rational_json(p.eps, exact)},
            {"tau", rational_json(p.tau(), exact)},
            {"x", rational_json(p.x(), exact)}};
}

// ---------------------------------------------------------------------------

int cmd_decay(const CommonFlags& f, std::ostream& out, std::ostream& err) {
    const auto params = make_params(f);
    const auto ladder = decay_ladder(params);
    const unsigned bits = pick_precision(f, params.n, params.x());
    const auto report = decay_report(ladder, PrecisionCtx::bits(bits));
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';

    json j = params_json(params, f.exact);
    j["zeta_exact"] = real_json(report.zeta_exact, f.exact);
    for (int k = 0; k < 3; ++k) {
        j[fmt::format("zeta_lagrange{}", k + 1)] =
            rational_json(report.zeta_lagrange_exact[static_cast<std::size_t>(k)], f.exact);
    }
    j["zeta_newton"] = real_json(report.zeta_newton_bound, f.exact);
    j["bound_ordering_ok"] = report.bound_ordering_ok;
    j["precision_bits"] = report.precision_bits;
    emit(j.dump(2) + "\n", f.out, out);
    return kExitOk;
}

struct SweepFlags {
    std::string n_values = "4:60";
    std::string x_values;
    std::string tau_values;
    bool strict = false;
    unsigned threads = 0;
};

std::vector<unsigned> parse_n_values(const std::string& text) {
    std::vector<unsigned> out;
    auto to_unsigned = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const long v = std::stol(s, &used);
            if (used != s.size() || v < 1) throw std::invalid_argument(s);
            return static_cast<unsigned>(v);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidParameter, "bad N value '" + s + "'");
        }
    };
    if (auto colon = text.find(':'); colon != std::string::npos) {
        const unsigned a = to_unsigned(text.substr(0, colon));
        const unsigned b = to_unsigned(text.substr(colon + 1));
        for (unsigned n = a; n <= b; ++n) out.push_back(n);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_unsigned(item));
    }
    if (out.empty()) throw Error(ErrorKind::InvalidParameter, "empty N list");
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i] <= out[i - 1]) throw Error(ErrorKind::InvalidParameter, "N values must ascend");
    }
    return out;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
    if (out.empty()) throw Error(ErrorKind::InvalidParameter, "empty value list");
    std::sort(out.begin(), out.end());
    return out;
}

struct SweepRow {
    unsigned n = 0;
    Rational tau;
    std::optional<Real> zeta;
    std::optional<Rational> lagrange2;
    std::optional<Real> newton;
    std::string error;
    ErrorKind error_kind = ErrorKind::InvalidParameter;
};

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c == '\n' ? ' ' : c;
    }
    return q + "\"";
}

int cmd_sweep(const CommonFlags& f, const SweepFlags& s, std::ostream& out, std::ostream& err) {
    const Rational eps = parse_rational(f.eps);
    const Rational delta = parse_rational(f.delta);
    if (eps < 0) throw Error(ErrorKind::InvalidParameter, "eps must be >= 0");
    const auto ns = parse_n_values(s.n_values);
    const bool fixed_tau = !s.tau_values.empty();
    const auto values = parse_rational_list(fixed_tau ? s.tau_values
                                                      : (s.x_values.empty() ? "1/2,1,2,3" : s.x_values));

    std::vector<SweepRow> rows;
    Rational max_x = 0;
    for (unsigned n : ns) {
        for (const auto& v : values) {
            SweepRow row;
            row.n = n;
            row.tau = fixed_tau ? v : v / n;
            max_x = std::max(max_x, Rational(row.tau * n));
            rows.push_back(std::move(row));
        }
    }
    const unsigned bits = pick_precision(f, ns.back(), max_x);
    const PrecisionCtx ctx = PrecisionCtx::bits(bits);

    // One precision for the whole sweep, set before the workers start.
    ScopedPrecision guard(bits);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            auto& row = rows[i];
            try {
                const auto params = EpsSisParams::from_tau(row.n, row.tau, delta, eps);
                const auto report = decay_report(decay_ladder(params), ctx);
                row.zeta = report.zeta_exact;
                row.lagrange2 = report.zeta_lagrange_exact[1];
                row.newton = report.zeta_newton_bound;
                if (!report.bound_ordering_ok) row.error = "bound ordering violated";
            } catch (const Error& e) {
                row.error = e.what();
                row.error_kind = e.kind();
            }
        }
    };
    unsigned threads = s.threads ? s.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(rows.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    const std::string meta = fmt::format(
        "version={} precision_bits={} eps={} delta={} seed_policy=none(deterministic) digits={}",
        kVersion, bits, format_rational(eps), format_rational(delta), f.exact ? "exact" : "17");
    std::ostringstream text;
    std::size_t failures = 0;
    std::optional<ErrorKind> first_kind;
    if (f.format == "json") {
        json j;
        j["meta"] = meta;
        j["rows"] = json::array();
        for (const auto& r : rows) {
            json row = {{"n", r.n},
                        {"tau", rational_json(r.tau, f.exact)},
                        {"x", rational_json(r.tau * r.n, f.exact)},
                        {"eps", rational_json(eps, f.exact)},
                        {"precision_bits", bits}};
            if (r.zeta) {
                row["zeta_exact"] = real_json(*r.zeta, f.exact);
                row["zeta_lagrange2"] = rational_json(*r.lagrange2, f.exact);
                row["zeta_newton"] = real_json(*r.newton, f.exact);
                const Real z = *r.zeta;
                row["rel_err_lagrange2"] = real_json(Real(abs_value(Real(Real(*r.lagrange2) - z)) / abs_value(z)), false);
                row["rel_err_newton"] = real_json(Real(abs_value(Real(*r.newton - z)) / abs_value(z)), false);
            }
            row["error"] = r.error.empty() ? json(nullptr) : json(r.error);
            j["rows"].push_back(row);
        }
        text << j.dump(2) << '\n';
    } else {
        text << "# meta: " << meta << '\n';
        text << "n,tau,x,eps,zeta_exact,zeta_lagrange2,zeta_newton,rel_err_lagrange2,rel_err_newton,"
                "precision_bits,error\n";
        for (const auto& r : rows) {
            text << r.n << ',' << rational_text(r.tau, f.exact) << ','
                 << rational_text(r.tau * r.n, f.exact) << ',' << rational_text(eps, f.exact) << ',';
            if (r.zeta) {
                const Real z = *r.zeta;
                const Real l2(*r.lagrange2);
                text << real_text(z, f.exact) << ',' << rational_text(*r.lagrange2, f.exact) << ','
                     << real_text(*r.newton, f.exact) << ','
                     << format_decimal(Real(abs_value(Real(l2 - z)) / abs_value(z)), 17) << ','
                     << format_decimal(Real(abs_value(Real(*r.newton - z)) / abs_value(z)), 17);
            } else {
                text << ",,,,";
            }
            text << ',' << bits << ',' << csv_quote(r.error) << '\n';
        }
    }
    for (const auto& r : rows) {
        if (r.error.empty()) continue;
        ++failures;
        if (!first_kind && r.zeta == std::nullopt) first_kind = r.error_kind;
        err << fmt::format("warning: N={} tau={}: {}\n", r.n, format_rational(r.tau), r.error);
    }
    emit(text.str(), f.out, out);
    if (failures > 0 && s.strict) {
        return first_kind == ErrorKind::PrecisionExhausted ? kExitPrecision : kExitValidation;
    }
    return kExitOk;
}

int cmd_lifetime(const CommonFlags& f, std::ostream& out, std::ostream&) {
    const auto params = make_params(f);
    const auto report = mean_absorption_time(params);
    json j = params_json(params, f.exact);
    j.erase("eps");
    j["F_direct"] = rational_json(report.F_direct, f.exact);
    j["F_taylor"] = rational_json(report.F_taylor, f.exact);
    j["F_expint"] = report.F_expint ? json(*report.F_expint) : json(nullptr);
    j["F_asymptotic"] = report.F_asymptotic ? json(*report.F_asymptotic) : json(nullptr);
    j["E_T"] = rational_json(report.E_T, f.exact);
    j["regime"] = to_string(report.regime);
    j["max_pairwise_relative_gap"] = report.max_pairwise_relative_gap;
    j["zeta_exact"] = nullptr;
    j["zeta_F_residual"] = nullptr;
    if (params.x() > 1) {
        const unsigned bits = pick_precision(f, params.n, params.x());
        const Real zeta = exact_zeta(decay_ladder(params), PrecisionCtx::bits(bits));
        ScopedPrecision guard(bits);
        const Real residual = abs_value(Real(zeta * Real(report.F_direct) + 1));
        j["zeta_exact"] = real_json(zeta, f.exact);
        j["zeta_F_residual"] = real_json(residual, f.exact);
    }
    j["notes"] = report.notes;
    emit(j.dump(2) + "\n", f.out, out);
    return kExitOk;
}

int cmd_regimes(const CommonFlags& f, const std::string& x_values, std::ostream& out,
                std::ostream&) {
    if (f.n == 0) throw Error(ErrorKind::InvalidParameter, "--n must be at least 1");
    const Rational delta = parse_rational(f.delta);
    const auto xs = parse_rational_list(x_values);
    json rows = json::array();
    std::ostringstream csv;
    csv << "# meta: version=" << kVersion << '\n';
    csv << "n,x,tau,regime,leading_estimate,zeta_exact,relative_gap,order\n";
    for (const auto& x : xs) {
        const auto regime = decay_regime(f.n, x, delta);
        const auto params = EpsSisParams::from_x(f.n, x, delta, 0);
        std::optional<Real> zeta;
        if (x > 0) {
            zeta = exact_zeta(decay_ladder(params),
                              PrecisionCtx::bits(pick_precision(f, f.n, x)));
        }
        std::optional<Real> gap;
        if (zeta && regime.leading_estimate) {
            gap = abs_value(Real(*regime.leading_estimate + *zeta)) / abs_value(*zeta);
        }
        json row = {{"n", f.n},
                    {"x", rational_json(x, f.exact)},
                    {"tau", rational_json(params.tau(), f.exact)},
                    {"regime", to_string(regime.regime)},
                    {"leading_estimate", regime.leading_estimate ? real_json(*regime.leading_estimate, f.exact) : json(nullptr)},
                    {"zeta_exact", zeta ? real_json(*zeta, f.exact) : json(nullptr)},
                    {"relative_gap", gap ? real_json(*gap, false) : json(nullptr)},
                    {"order", regime.order}};
        rows.push_back(row);
        csv << f.n << ',' << rational_text(x, f.exact) << ',' << rational_text(params.tau(), f.exact)
            << ',' << to_string(regime.regime) << ','
            << (regime.leading_estimate ? real_text(*regime.leading_estimate, f.exact) : "") << ','
            << (zeta ? real_text(*zeta, f.exact) : "") << ','
            << (gap ? format_decimal(*gap, 17) : "") << ',' << csv_quote(regime.order) << '\n';
    }
    if (f.format == "csv") {
        emit(csv.str(), f.out, out);
    } else {
        emit(json{{"rows", rows}}.dump(2) + "\n", f.out, out);
    }
    return kExitOk;
}

int cmd_simulate(const CommonFlags& f, unsigned start_flag, double budget_seconds, unsigned threads,
                 std::ostream& out, std::ostream& err) {
    const auto params = make_params(f);
    const unsigned start = start_flag ? start_flag : params.n;
    if (params.x() > 1) {
        err << "warning: above threshold (x > 1) E[T] grows exponentially with N; the simulation "
               "may exhaust its wall-clock budget and return partial results\n";
    }
    SimulationOptions options;
    options.budget = std::chrono::milliseconds(static_cast<long long>(budget_seconds * 1000));
    options.threads = threads;
    const auto sim = gillespie_simulate(params, start, f.runs, f.seed, options);
    if (!sim.complete) {
        err << fmt::format("warning: budget exhausted after {} of {} runs; results are partial\n",
                           sim.samples.size(), sim.runs_requested);
    }
    Rational expected;
    if (params.beta > 0) {
        expected = hitting_time_solve(build_eps_sis_ladder(params))[start];
    } else {
        for (unsigned j = 1; j <= start; ++j) expected += Rational(1) / (params.delta * j);
    }
    if (f.format == "csv") {
        std::ostringstream csv;
        csv << "# meta: version=" << kVersion << " rng=" << sim.rng << " seed=" << f.seed
            << " complete=" << (sim.complete ? "true" : "false") << '\n';
        csv << "run,seed,start_state,t\n";
        for (const auto& s : sim.samples) {
            csv << s.run << ',' << s.seed << ',' << s.start_state << ',' << format_decimal(s.t, 17)
                << '\n';
        }
        emit(csv.str(), f.out, out);
        return kExitOk;
    }
    json j = params_json(params, f.exact);
    j["start"] = start;
    j["runs"] = f.runs;
    j["completed"] = sim.samples.size();
    j["complete"] = sim.complete;
    j["seed"] = f.seed;
    j["rng"] = sim.rng;
    j["mean"] = sim.mean;
    j["stderr"] = sim.stderr_mean;
    j["E_T_exact"] = rational_json(expected, f.exact);
    j["z_score"] = sim.stderr_mean > 0
                       ? json((sim.mean - expected.convert_to<double>()) / sim.stderr_mean)
                       : json(nullptr);
    emit(j.dump(2) + "\n", f.out, out);
    return kExitOk;
}

int cmd_validate(const std::string& level, const std::string& fault, const std::string& path,
                 std::ostream& out, std::ostream& err) {
    const auto report = run_validation(level == "full" ? ValidationLevel::Full : ValidationLevel::Quick,
                                       fault == "f2-sign" ? Fault::F2SignFlip : Fault::None);
    emit(report.to_json().dump(2) + "\n", path, out);
    if (auto failure = report.first_failure()) {
        err << fmt::format("validation failed: {} ({}): {}\n", failure->property, failure->suite,
                           failure->detail);
        return kExitValidation;
    }
    return kExitOk;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::PrecisionExhausted:
            return kExitPrecision;
        case ErrorKind::InvalidParameter:
        case ErrorKind::DomainError:
        case ErrorKind::ReducibleChain:
        case ErrorKind::UnsupportedStructure:
            return kExitUsage;
        default:
            return kExitValidation;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decay parameter and absorption time of birth-death chains and the eps-SIS model",
                 "sisdecay"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonFlags decay_f, sweep_f, life_f, reg_f, sim_f;
    auto* decay = app.add_subcommand("decay", "zeta and its estimators at one parameter point");
    add_rate_flags(decay, decay_f, true);
    add_output_flags(decay, decay_f, "json");
    int order = 3;
    decay->add_option("--order", order, "highest Lagrange order of interest")
        ->check(CLI::Range(1, 3));

    auto* sweep = app.add_subcommand("sweep", "zeta over a grid of N and tau (CSV)");
    SweepFlags sweep_s;
    sweep_f.eps = "1/100000";
    sweep->add_option("--eps", sweep_f.eps, "self-infection rate")->capture_default_str();
    sweep->add_option("--delta", sweep_f.delta, "curing rate")->capture_default_str();
    sweep->add_option("--n-values", sweep_s.n_values, "A:B or a comma list, ascending")
        ->capture_default_str();
    auto* xv = sweep->add_option("--x-values", sweep_s.x_values, "tau = x/N for each x (default 1/2,1,2,3)");
    auto* tv = sweep->add_option("--tau-values", sweep_s.tau_values, "fixed tau list");
    xv->excludes(tv);
    sweep->add_flag("--strict", sweep_s.strict, "non-zero exit when any row fails");
    sweep->add_option("--threads", sweep_s.threads, "worker threads (0: all cores)");
    add_output_flags(sweep, sweep_f, "csv");

    auto* lifetime = app.add_subcommand("lifetime", "mean absorption time F(tau) four ways");
    add_rate_flags(lifetime, life_f, true);
    add_output_flags(lifetime, life_f, "json");

    auto* regimes = app.add_subcommand("regimes", "below / at / above threshold table");
    std::string reg_x = "1/2,1,2,3";
    regimes->add_option("--n", reg_f.n, "number of nodes N")->required();
    regimes->add_option("--delta", reg_f.delta, "curing rate")->capture_default_str();
    regimes->add_option("--x-values", reg_x, "x list")->capture_default_str();
    add_output_flags(regimes, reg_f, "json");

    auto* simulate = app.add_subcommand("simulate", "Gillespie absorption times (eps = 0)");
    add_rate_flags(simulate, sim_f, true);
    add_output_flags(simulate, sim_f, "json");
    unsigned start = 0;
    double budget = 60;
    unsigned sim_threads = 0;
    simulate->add_option("--seed", sim_f.seed, "base seed")->capture_default_str();
    simulate->add_option("--runs", sim_f.runs, "number of runs")->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--start", start, "start state (default N)");
    simulate->add_option("--budget-seconds", budget, "wall-clock budget")->capture_default_str();
    simulate->add_option("--threads", sim_threads, "worker threads (0: all cores)");

    auto* validate = app.add_subcommand("validate", "run the bundled cross-checks");
    std::string level = "quick";
    std::string fault = "none";
    std::string validate_out;
    validate->add_option("--level", level)->check(CLI::IsMember({"quick", "full"}))->capture_default_str();
    validate->add_option("--out", validate_out, "write the JSON summary to PATH");
    validate->add_option("--inject-fault", fault)->check(CLI::IsMember({"none", "f2-sign"}))->group("");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*decay) return cmd_decay(decay_f, out, err);
        if (*sweep) return cmd_sweep(sweep_f, sweep_s, out, err);
        if (*lifetime) return cmd_lifetime(life_f, out, err);
        if (*regimes) return cmd_regimes(reg_f, reg_x, out, err);
        if (*simulate) return cmd_simulate(sim_f, start, budget, sim_threads, out, err);
        if (*validate) return cmd_validate(level, fault, validate_out, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitUsage;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace sisdecay
