// spectral-torsion: batch entry points over the identity suites, density
// evaluation, the flat-torus heat trace and the round-sphere benchmark.
// Exit codes: 0 success, 1 identity or tolerance failure, 2 input or config error.

#include <cstdio>
#include <fstream>
#include <iostream>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <spectral_torsion/verify.hpp>

using namespace spectral_torsion;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInputError = 2;

struct Output {
    std::string path;

    void write(const Json& doc) const {
        std::string text = doc.dump(2) + "\n";
        if (path.empty() || path == "-") {
            std::cout << text;
            return;
        }
        std::ofstream out(path);
        if (!out) throw InputError(path, "cannot open output file");
        out << text;
    }
};

// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::uint64_t seed = 7;
    int trials = 100;
    std::string arith = "rational";
    std::vector<std::string> suites;
    std::string mutate;
    int workers = 0;
    double tol_abs = 1e-8, tol_rel = 1e-9;
};

int cmd_verify(const VerifyArgs& a, const Output& out) {
    VerifyOptions opt;
    opt.seed = a.seed;
    opt.trials = a.trials;
    opt.workers = a.workers;
    opt.tol = {a.tol_abs, a.tol_rel};
    opt.mutation.coefficient = a.mutate;
    opt.validate();
    bool exact = a.arith == "rational";
    auto names = a.suites.empty() ? suite_names() : a.suites;

    Json suites = Json::array();
    bool all_ok = true;
    for (const auto& name : names) {
        auto r = run_suite(name, opt, exact);
        all_ok = all_ok && r.ok();
        suites.push_back(as_json(r));
        std::fprintf(stderr, "%-18s %s  %ld checks, %ld failed  (%.0f ms)\n", name.c_str(), r.ok() ? "PASS" : "FAIL",
                     r.checks(), r.total_failures, r.runtime_ms);
        for (const auto& f : r.failures)
            std::fprintf(stderr, "  %s failed at trial %d (trial seed %llu): %s vs %s\n", f.identity.c_str(), f.trial,
                         static_cast<unsigned long long>(f.trial_seed), f.lhs.c_str(), f.rhs.c_str());
    }
    out.write(Json{{"schema", kSchemaVersion},
                   {"kind", "verify"},
                   {"seed", a.seed},
                   {"trials", a.trials},
                   {"arith", a.arith},
                   {"mutation", a.mutate.empty() ? Json(nullptr) : Json(a.mutate)},
                   {"passed", all_ok},
                   {"suites", suites}});
    return all_ok ? kOk : kFailure;
}

// ---------------------------------------------------------------------------

struct DensityArgs {
    std::string jet, twist;
    std::string op = "dstar-d";
    std::string method = "closed";
    std::string arith = "rational";
};

template <RealScalar R>
int density(const DensityArgs& a, const Output& out) {
    auto j = build_jet(jet_fields_from_json<R>(load_json_file(a.jet)));
    std::optional<TwistData<R>> t;
    if (!a.twist.empty()) {
        t = twist_from_json<R>(load_json_file(a.twist));
        validate(*t);
    }
    if (a.op != "hplus" && t) throw ConfigError("--twist only applies to --operator hplus");
    if (a.op == "hplus" && !t) t = TwistData<R>::trivial(1);
    if (j.n != 4) throw UnsupportedDimension(j.n);

    bool generic = a.method == "generic";
    SeeleyReport<R> r;
    if (a.op == "dstar-d")
        r = generic ? dstar_d_generic(j) : dstar_d_coeffs(j);
    else if (a.op == "chiral")
        r = generic ? chiral_generic(j) : chiral_coeffs(j);
    else
        r = generic ? hplus_generic(j, *t) : hplus_coeffs(j, *t);
    out.write(as_json(r));
    return kOk;
}

// ---------------------------------------------------------------------------

struct HeatArgs {
    double T123 = 0;
    std::vector<double> V{0, 0, 0, 0};
    int cutoff = 0;
    std::vector<double> times;
    bool chiral = false;
    int workers = 0;
    double tol_a0 = 1e-4, tol_a2 = 1e-2, tol_a4 = 1e-2;
};

// a0 and a2 are compared relatively; a4 against tol_a4 times the a2 scale (the
// a0 scale when the analytic a2 vanishes). A vanishing analytic a2 is compared
// against tol_a2 times the a0 scale.
Json heat_checks(const FitResult& f, double tol_a0, double tol_a2, double tol_a4, bool& ok) {
    double s0 = std::abs(f.analytic[0]);
    double s2 = f.analytic[1] != 0 ? std::abs(f.analytic[1]) : s0;
    std::array<double, 3> bound = {tol_a0 * s0, tol_a2 * (f.analytic[1] != 0 ? s2 : s0), tol_a4 * s2};
    Json checks = Json::array();
    ok = true;
    for (int k = 0; k < 3; ++k) {
        bool pass = f.abs_err[static_cast<std::size_t>(k)] <= bound[static_cast<std::size_t>(k)];
        ok = ok && pass;
        checks.push_back({{"coefficient", "a" + std::to_string(2 * k)},
                          {"abs_error", f.abs_err[static_cast<std::size_t>(k)]},
                          {"bound", bound[static_cast<std::size_t>(k)]},
                          {"passed", pass}});
    }
    return checks;
}

int cmd_heat_torus(const HeatArgs& a, const Output& out) {
    if (a.V.size() != 4) throw ConfigError("--V takes four components");
    for (double x : {a.tol_a0, a.tol_a2, a.tol_a4})
        if (!(x > 0)) throw ConfigError("tolerances must be positive");
    TorusSpec s;
    for (const auto& sp : detail::permutations(3)) {
        MultiIndex idx{};
        for (int k = 0; k < 3; ++k) idx[k] = sp.perm[k];
        s.T.at(idx) = sp.sign * a.T123;
    }
    for (int i = 0; i < 4; ++i) s.V(i) = a.V[static_cast<std::size_t>(i)];
    s.cutoff = a.cutoff;
    if (!a.times.empty()) s.times = a.times;
    s.chiral = a.chiral;
    s.workers = a.workers;
    validate(s);

    FitResult f = heat_trace_fit(s);
    bool ok = false;
    Json doc = as_json(f, as_json(s));
    doc["checks"] = heat_checks(f, a.tol_a0, a.tol_a2, a.tol_a4, ok);
    doc["passed"] = ok;
    out.write(doc);
    return ok ? kOk : kFailure;
}

struct SphereArgs {
    int levels = 400;
    std::vector<double> times;
    double tol_a0 = 1e-5, tol_a2 = 1e-3;
};

int cmd_sphere(const SphereArgs& a, const Output& out) {
    if (a.levels < 1) throw ConfigError("--levels must be positive");
    if (!(a.tol_a0 > 0) || !(a.tol_a2 > 0)) throw ConfigError("tolerances must be positive");
    auto times = a.times.empty() ? default_sphere_times() : a.times;
    for (double t : times)
        if (!(t > 0)) throw ConfigError("times must be positive");
    FitResult f = sphere_benchmark(round_s4_spectrum(a.levels), times);
    bool ok = f.abs_err[0] <= a.tol_a0 && f.abs_err[1] <= a.tol_a2;
    Json doc = as_json(f, Json{{"manifold", "round S4"}, {"levels", a.levels}, {"times", times}});
    doc["checks"] = Json::array({{{"coefficient", "a0"}, {"abs_error", f.abs_err[0]}, {"bound", a.tol_a0}, {"passed", f.abs_err[0] <= a.tol_a0}},
                                 {{"coefficient", "a2"}, {"abs_error", f.abs_err[1]}, {"bound", a.tol_a2}, {"passed", f.abs_err[1] <= a.tol_a2}}});
    doc["passed"] = ok;
    out.write(doc);
    return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heat coefficients and spectral action densities for connections with torsion"};
    app.require_subcommand(1);
    app.fallthrough();
    Output out;
    app.add_option("--out", out.path, "Write the JSON report to FILE (default stdout)");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Run the seeded identity suites");
    verify->add_option("--seed", va.seed, "Base seed");
    verify->add_option("--trials", va.trials, "Trials per suite");
    verify->add_option("--arith", va.arith, "rational or float")->check(CLI::IsMember({"rational", "float"}));
    verify->add_option("--suite", va.suites, "Restrict to these suites")->check(CLI::IsMember(suite_names()));
    verify->add_option("--mutate", va.mutate, "Flip the sign of one potential coefficient");
    verify->add_option("--workers", va.workers, "Worker threads (0: all cores)");
    verify->add_option("--tol-abs", va.tol_abs, "Absolute tolerance in float mode");
    verify->add_option("--tol-rel", va.tol_rel, "Relative tolerance in float mode");

    DensityArgs da;
    auto* dens = app.add_subcommand("density", "Heat coefficient densities of a jet");
    dens->add_option("--jet", da.jet, "Jet JSON file")->required();
    dens->add_option("--twist", da.twist, "Twist JSON file (hplus only)");
    dens->add_option("--operator", da.op, "dstar-d, chiral or hplus")
        ->check(CLI::IsMember({"dstar-d", "chiral", "hplus"}));
    dens->add_option("--method", da.method, "closed or generic")->check(CLI::IsMember({"closed", "generic"}));
    dens->add_option("--arith", da.arith, "rational or float")->check(CLI::IsMember({"rational", "float"}));

    HeatArgs ha;
    auto* heat = app.add_subcommand("heat-torus", "Fit the heat trace of the Dirac square on the flat 4-torus");
    heat->add_option("--T123", ha.T123, "Constant axial torsion component");
    heat->add_option("--V", ha.V, "Constant vector torsion a,b,c,d")->delimiter(',')->expected(4);
    heat->add_option("--cutoff", ha.cutoff, "Lattice cutoff K (0: truncation rule)");
    heat->add_option("--times", ha.times, "Fit times t1,...,tk")->delimiter(',');
    heat->add_flag("--chiral", ha.chiral, "Trace against the positive chirality projector");
    heat->add_option("--workers", ha.workers, "Worker threads (0: all cores)");
    heat->add_option("--tol-a0", ha.tol_a0, "Relative tolerance for a0");
    heat->add_option("--tol-a2", ha.tol_a2, "Relative tolerance for a2");
    heat->add_option("--tol-a4", ha.tol_a4, "Tolerance for a4 relative to the a2 scale");

    SphereArgs sa;
    auto* sphere = app.add_subcommand("sphere", "Fit the heat trace of the round S4 spectrum");
    sphere->add_option("--levels", sa.levels, "Number of eigenvalue levels");
    sphere->add_option("--times", sa.times, "Fit times t1,...,tk")->delimiter(',');
    sphere->add_option("--tol-a0", sa.tol_a0, "Absolute tolerance for a0");
    sphere->add_option("--tol-a2", sa.tol_a2, "Absolute tolerance for a2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*verify) return cmd_verify(va, out);
        if (*dens) return da.arith == "rational" ? density<Rational>(da, out) : density<double>(da, out);
        if (*heat) return cmd_heat_torus(ha, out);
        if (*sphere) return cmd_sphere(sa, out);
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error at %s\n", e.what());
        return kInputError;
    } catch (const InvariantViolation& e) {
        std::fprintf(stderr, "rejected: %s\n", e.what());
        return kInputError;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kInputError;
    } catch (const NumericalGuard& e) {
        std::fprintf(stderr, "numerical guard: %s\n", e.what());
        return kInputError;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInputError;
    }
    return kInputError;
}
