#pragma once

// Seeded identity suites over random exact (or floating) data. Each suite runs a
// number of independent trials; trial t of suite s draws from
// trial_seed(trial_seed(seed, s), t), so results do not depend on scheduling.

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "io.hpp"
#include "random.hpp"

namespace spectral_torsion {

struct CheckOutcome {
    std::string identity;
    bool ok = true;
    std::string lhs, rhs;  // filled on failure
};

struct IdentityTally {
    std::string identity;
    int passed = 0;
    int failed = 0;
};

struct FailureRecord {
    std::string identity;
    int trial = 0;
    std::uint64_t trial_seed = 0;
    std::string lhs, rhs;
};

struct SuiteResult {
    std::string suite;
    int trials = 0;
    std::vector<IdentityTally> identities;
    std::vector<FailureRecord> failures;  // first few, ordered by trial
    long total_failures = 0;
    double runtime_ms = 0;

    bool ok() const { return total_failures == 0; }
    long checks() const {
        long c = 0;
        for (const auto& t : identities) c += t.passed + t.failed;
        return c;
    }
};

// Which potential coefficient to corrupt; "" leaves the potential intact.
struct VerifyMutation {
    std::string coefficient;

    template <RealScalar R>
    PotentialCoefficients<R> apply() const {
        PotentialCoefficients<R> c;
        if (coefficient.empty()) return c;
        std::map<std::string, R*> slots{{"scalar_curv", &c.scalar_curv}, {"torsion_sq", &c.torsion_sq},
                                        {"div_v", &c.div_v},             {"vector_sq", &c.vector_sq},
                                        {"dt", &c.dt},                   {"t_dot_v", &c.t_dot_v},
                                        {"v_into_t", &c.v_into_t}};
        auto it = slots.find(coefficient);
        if (it == slots.end()) throw ConfigError("unknown potential coefficient '" + coefficient + "'");
        *it->second = -*it->second;
        return c;
    }
};

struct VerifyOptions {
    std::uint64_t seed = 7;
    int trials = 100;
    int workers = 0;
    Tolerance tol{1e-8, 1e-9};  // float arithmetic only
    VerifyMutation mutation;
    int max_failure_records = 10;

    void validate() const {
        if (trials < 1) throw ConfigError("trials must be at least 1");
        if (!(tol.abs > 0) || !(tol.rel > 0)) throw ConfigError("tolerances must be positive");
        if (workers < 0) throw ConfigError("workers must be non-negative");
        mutation.apply<Rational>();
    }
};

namespace verify {

template <RealScalar R>
std::string describe(const R& x) {
    return RealTraits<R>::format(x);
}

template <RealScalar R>
std::string describe(const Gaussian<R>& z) {
    std::ostringstream os;
    os << z;
    return os.str();
}

template <Scalar S>
std::string describe(const Tensor<S>& t) {
    std::ostringstream os;
    os << "rank-" << t.rank() << " tensor, |.|^2 = " << describe(norm2(t));
    return os.str();
}

template <Scalar S>
std::string describe(const Matrix<S>& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " matrix, trace " + describe(trace(m));
}

inline std::string describe(bool b) { return b ? "true" : "false"; }

template <class T>
bool agree(const T& a, const T& b, Tolerance tol) {
    if constexpr (std::is_same_v<T, bool>)
        return a == b;
    else
        return near(a, b, tol);
}

class Recorder {
public:
    explicit Recorder(Tolerance tol) : tol_(tol) {}

    template <class T>
    void equal(std::string_view identity, const T& lhs, const T& rhs) {
        bool ok = agree(lhs, rhs, tol_);
        out_.push_back({std::string(identity), ok, ok ? "" : describe(lhs), ok ? "" : describe(rhs)});
    }

    void holds(std::string_view identity, bool ok, const std::string& detail = {}) {
        out_.push_back({std::string(identity), ok, ok ? "" : detail, ok ? "" : "expected to hold"});
    }

    Tolerance tol() const { return tol_; }
    std::vector<CheckOutcome> take() { return std::move(out_); }

private:
    Tolerance tol_;
    std::vector<CheckOutcome> out_;
};

// Direct contraction c(Q)_xy = Σ_i Q_ixyi, written out independently.
template <Scalar S>
Tensor<S> contract_first_last(const Tensor<S>& q) {
    int n = q.dim();
    Tensor<S> out(n, 2);
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) out(x, y) += q(i, x, y, i);
    return out;
}

template <RealScalar R>
bool is_multiple_of(const Tensor<R>& x, const Tensor<R>& base, Tolerance tol) {
    R c = tensor_inner(x, base) / norm2(base);
    return near(x, Tensor<R>(base * c), tol);
}

// ---------------------------------------------------------------------------

template <RealScalar R>
void curvature_algebra_trial(Rng& rng, int trial, Recorder& rec, const VerifyMutation&) {
    const Tensor<R> g = metric<R>(4);
    const Tensor<R> gg = kn_product(g, g);
    const Tensor<R> omega = volume_form<R>(4);
    Tolerance tol = rec.tol();

    auto h = random_tensor<R>(rng, 4, 2), k = random_tensor<R>(rng, 4, 2);
    R trk = trace2(k);
    rec.equal("kn product symmetry", kn_product(h, k), kn_product(k, h));
    rec.equal("kn product contraction", ricci_contraction(kn_product(k, g)), Tensor<R>(k * R(-2) - g * trk));
    rec.equal("kn product norm", norm2(kn_product(k, g)), R(R(8) * norm2(k) + R(4) * trk * trk));
    rec.equal("metric square norm", norm2(gg), R(96));
    rec.equal("metric square contraction", ricci_contraction(gg), Tensor<R>(g * R(-6)));

    auto x = random_tensor<R>(rng, 4, 4), y = random_tensor<R>(rng, 4, 4);
    rec.equal("bianchi idempotent", bianchi(bianchi(x)), bianchi(x));
    rec.equal("bianchi self-adjoint", tensor_inner(bianchi(x), y), tensor_inner(x, bianchi(y)));
    rec.equal("bianchi fixes volume form", bianchi(omega), omega);

    auto q = random_curvature_like<R>(rng, 4), p = random_curvature_like<R>(rng, 4);
    auto d = decompose6(q);
    Tensor<R> sum(4, 4);
    for (const auto& part : d.parts) sum += part;
    rec.equal("decomposition sum", sum, q);
    bool orthogonal = true;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) orthogonal = orthogonal && near(tensor_inner(d.parts[i], d.parts[j]), R(0), tol);
    rec.holds("decomposition orthogonality", orthogonal);

    rec.holds("scalar component", is_multiple_of(d[Component::S], gg, tol));
    rec.holds("four-form component", is_multiple_of(d[Component::L4], omega, tol));
    auto hs = Tensor<R>(ricci_contraction(d[Component::HS]) * ratio<R>(-1, 2));
    rec.holds("traceless symmetric component", near(hs, transpose2(hs), tol) && near(trace2(hs), R(0), tol) &&
                                                    near(d[Component::HS], kn_product(hs, g), tol));
    rec.holds("symmetric weyl component", is_algebraic_curvature(d[Component::WS]) &&
                                              near(ricci_contraction(d[Component::WS]), Tensor<R>(4, 2), tol));
    auto ha = Tensor<R>(ricci_contraction(d[Component::HA]) * ratio<R>(-1, 2));
    rec.holds("antisymmetric trace component",
              near(ha, Tensor<R>(-transpose2(ha)), tol) && near(d[Component::HA], kn_product(ha, g), tol));
    rec.holds("antisymmetric weyl component", is_pair_antisymmetric(d[Component::WA]) &&
                                                  near(ricci_contraction(d[Component::WA]), Tensor<R>(4, 2), tol));

    if (trial == 0) {
        // Ranks of the six projectors: trace over the basis (e^a∧e^b)⊗(e^c∧e^d).
        std::array<R, 6> ranks{};
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    for (int e = c + 1; e < 4; ++e) {
                        Tensor<R> unit(4, 4);
                        unit(a, b, c, e) = unit(b, a, e, c) = R(1);
                        unit(b, a, c, e) = unit(a, b, e, c) = R(-1);
                        auto du = decompose6(unit);
                        for (int s = 0; s < 6; ++s) ranks[s] += tensor_inner(du.parts[s], unit) / norm2(unit);
                    }
        bool dims = true;
        for (Component c : kComponents) dims = dims && near(ranks[static_cast<int>(c)], R(component_dimension(c)), tol);
        rec.holds("decomposition dimensions", dims);
    }

    auto hq = hodge_pair(q);
    rec.equal("hodge pair of metric square", hodge_pair(gg), Tensor<R>(omega * R(4)));
    rec.equal("hodge pair square", hodge_pair(hq), Tensor<R>(q * R(4)));
    rec.equal("hodge pair self-adjoint", tensor_inner(hq, p), tensor_inner(q, hodge_pair(p)));
    rec.equal("hodge pair norm", norm2(hq), R(R(4) * norm2(q)));

    using C = Component;
    const std::array<std::pair<C, C>, 6> image = {
        {{C::S, C::L4}, {C::L4, C::S}, {C::HS, C::WA}, {C::WA, C::HS}, {C::WS, C::WS}, {C::HA, C::HA}}};
    bool intertwines = true;
    for (auto [from, to] : image) {
        auto di = decompose6(hodge_pair(d[from]));
        for (C c : kComponents)
            if (c != to) intertwines = intertwines && near(di[c], Tensor<R>(4, 4), tol);
    }
    rec.holds("hodge pair component map", intertwines);

    auto a = random_form<R>(rng, 4, 2), b = random_form<R>(rng, 4, 2);
    R pairing = tensor_inner(kn_product(a, g), hodge_pair(kn_product(b, g)));
    rec.equal("antisymmetric trace pairing", pairing, R(R(8) * tensor_inner(a, pair_dual(b))));
    rec.equal("antisymmetric trace pairing via star", pairing, R(R(16) * tensor_inner(a, hodge_star(b))));
    auto s1 = random_symmetric2<R>(rng, 4), s2 = random_symmetric2<R>(rng, 4);
    rec.equal("symmetric trace pairing vanishes", tensor_inner(kn_product(s1, g), hodge_pair(kn_product(s2, g))), R(0));

    auto ag = kn_product(a, g);
    rec.equal("trace representative of antisymmetric trace part", kn_product(trace_rep(ag), g), hodge_pair(ag));
    auto rw = trace_rep(d[Component::WA]);
    rec.holds("trace representative of antisymmetric weyl part",
              near(rw, transpose2(rw), tol) && near(trace2(rw), R(0), tol) &&
                  near(kn_product(rw, g), hodge_pair(d[Component::WA]), tol));

    auto c = random_algebraic_curvature<R>(rng, 4);
    auto rd = ricci_decompose(c);
    Tensor<R> re = kn_product(g, g) * R(-rd.scalar / R(24));
    re += kn_product(rd.tracefree, g) * ratio<R>(-1, 2);
    re += rd.weyl;
    rec.equal("ricci decomposition reassembly", re, c);
    rec.equal("weyl part is trace free", ricci_contraction(rd.weyl), Tensor<R>(4, 2));
}

template <RealScalar R>
void torsion_curvature_trial(Rng& rng, int, Recorder& rec, const VerifyMutation&) {
    Tolerance tol = rec.tol();
    auto j = random_jet<R>(rng);
    auto p = curvature_pack(j);
    rec.equal("symmetric ricci closed form", contract_first_last(p.riemS), p.ricS);
    rec.equal("antisymmetric ricci closed form", contract_first_last(p.riemA), p.ricA);
    rec.equal("scalar curvature closed form", trace2(contract_first_last(p.riem)), p.R);
    rec.equal("modified scalar curvature", scalar_curvature(modified_jet(j)), p.Rtilde);
    rec.holds("bianchi kernel is algebraic", is_algebraic_curvature(p.riemS_ker));
    rec.holds("bianchi image is a four-form", is_alternating(p.riemS_im));

    auto r = norm_identities(j);
    rec.equal("weyl of bianchi kernel", r.weyl_ker, r.weyl_g);
    rec.equal("bianchi kernel norm", r.riemS_ker_direct, r.riemS_ker_closed);
    rec.equal("bianchi image norm", r.riemS_im_direct, r.riemS_im_closed);
    rec.equal("symmetric and antisymmetric norms add", r.riem_direct, r.riem_split);

    auto f = random_jet_fields<R>(rng);
    f.V = Tensor<R>(4, 1);
    f.gradV = Tensor<R>(4, 2);
    f.T = Tensor<R>(4, 3);
    f.gradT = Tensor<R>(4, 4);
    auto e = euler_integrands(build_jet(f));
    rec.equal("gauss-bonnet integrand without torsion", e.gauss_bonnet_torsion, e.gauss_bonnet_g);
    (void)tol;
}

template <RealScalar R>
void pontryagin_trial(Rng& rng, int, Recorder& rec, const VerifyMutation&) {
    auto d = pontryagin_densities(random_jet<R>(rng));
    rec.equal("pontryagin four-summand expansion",
              R(d.summands[0] + d.summands[1] + d.summands[2] + d.summands[3]), d.full);
    rec.equal("pontryagin scalar summand pointwise form", d.summands[2], d.scalar_summand_pointwise);
    rec.equal("pontryagin slot difference", R(d.full - d.chern_weil), R(R(2) * d.summands[3]));

    auto c = pontryagin_densities(random_constant_flat_jet<R>(rng));
    rec.equal("chern-weil density of constant fields", c.chern_weil, R(0));
    rec.equal("mixed summand on constant fields", c.mixed_lhs, c.mixed_rhs);
}

template <RealScalar R>
void clifford_trial(Rng& rng, int, Recorder& rec, const VerifyMutation& mutation) {
    using C = Gaussian<R>;
    auto coeffs = mutation.apply<R>();
    auto j = random_jet<R>(rng);
    auto t = trace_suite(j, coeffs);
    for (const auto& c : t.checks()) rec.equal(c.name, c.lhs, c.rhs);
    rec.equal("potential matrix and multivector models", to_matrix(potential_E_multivector(j, coeffs)),
              potential_E(j, coeffs).E);

    auto q = random_curvature_like<R>(rng, 4);
    auto om = spinor_curvature(q);
    Spinor<R> w = volume_element<R>();
    rec.equal("spinor curvature square trace", curvature_square_trace(om), C(ratio<R>(-1, 2) * norm2(q)));
    rec.equal("spinor curvature chiral square trace", curvature_square_trace(om, &w),
              C(ratio<R>(1, 4) * tensor_inner(q, hodge_pair(q))));

    Multivector<R> a, b;
    for (auto& x : a.coeff) x = C(rng.small_rational<R>(), rng.small_rational<R>());
    for (auto& x : b.coeff) x = C(rng.small_rational<R>(), rng.small_rational<R>());
    rec.equal("multivector product", to_matrix(a * b), Spinor<R>(to_matrix(a) * to_matrix(b)));
    rec.equal("multivector trace", trace(to_matrix(a)), C(a.scalar_part() * C(R(4))));
}

template <RealScalar R>
void twist_trial(Rng& rng, int trial, Recorder& rec, const VerifyMutation&) {
    constexpr std::array<int, 4> ranks = {1, 2, 3, 5};
    int m = ranks[static_cast<std::size_t>(trial) % ranks.size()];
    auto j = random_jet<R>(rng);
    auto t = random_twist<R>(rng, m);
    auto traces = twist_potential(j, t);
    for (const auto& c : traces.checks()) rec.equal(c.name, c.lhs, c.rhs);

    auto h = hplus_coeffs(j, TwistData<R>::trivial(1));
    auto c = chiral_coeffs(j);
    rec.holds("trivial twist gives the chiral coefficients",
              near(h.a0, c.a0, rec.tol()) && near(h.a2, c.a2, rec.tol()) && near(h.a4, c.a4, rec.tol()));

    if (t.gamma_trace() != 0) {
        R bi = barbero_immirzi(t);
        R mag = bi < R(0) ? R(-bi) : bi;
        rec.holds("barbero-immirzi modulus at least one", mag >= R(1), describe(bi));
    }
}

template <RealScalar R>
void density_trial(Rng& rng, int trial, Recorder& rec, const VerifyMutation&) {
    Tolerance tol = rec.tol();
    auto same = [&](const SeeleyReport<R>& x, const SeeleyReport<R>& y) {
        return near(x.a0, y.a0, tol) && near(x.a2, y.a2, tol) && near(x.a4, y.a4, tol);
    };
    auto j = random_constant_flat_jet<R>(rng);
    auto t = random_constant_twist<R>(rng, 1 + trial % 3);
    rec.holds("generic and closed form agree for D*D", same(dstar_d_generic(j), dstar_d_coeffs(j)));
    rec.holds("generic and closed form agree for P+D*D", same(chiral_generic(j), chiral_coeffs(j)));
    auto closed = hplus_coeffs(j, t), generic = hplus_generic(j, t);
    rec.equal("generic and closed form agree for twisted a0", generic.a0, closed.a0);
    rec.equal("generic and closed form agree for twisted a2", generic.a2, closed.a2);
    rec.equal("generic and closed form agree for twisted a4", generic.a4, closed.a4);
    rec.holds("term breakdown sums to coefficients", closed.breakdown_consistent(tol) && generic.breakdown_consistent(tol));
}

template <RealScalar R>
using TrialFn = std::function<void(Rng&, int, Recorder&, const VerifyMutation&)>;

template <RealScalar R>
const std::vector<std::pair<std::string, TrialFn<R>>>& suites() {
    static const std::vector<std::pair<std::string, TrialFn<R>>> all = {
        {"curvature_algebra", curvature_algebra_trial<R>}, {"torsion_curvature", torsion_curvature_trial<R>},
        {"pontryagin", pontryagin_trial<R>},               {"clifford_traces", clifford_trial<R>},
        {"twist", twist_trial<R>},                         {"densities", density_trial<R>},
    };
    return all;
}

}  // namespace verify

inline std::vector<std::string> suite_names() {
    std::vector<std::string> names;
    for (const auto& s : verify::suites<Rational>()) names.push_back(s.first);
    return names;
}

template <RealScalar R>
SuiteResult run_suite(const std::string& name, const VerifyOptions& opt) {
    opt.validate();
    const auto& all = verify::suites<R>();
    std::size_t index = all.size();
    for (std::size_t i = 0; i < all.size(); ++i)
        if (all[i].first == name) index = i;
    if (index == all.size()) throw ConfigError("unknown suite '" + name + "'");
    const auto& body = all[index].second;
    std::uint64_t suite_seed = trial_seed(opt.seed, index);
    Tolerance tol = RealTraits<R>::exact ? Tolerance{} : opt.tol;

    auto start = std::chrono::steady_clock::now();
    std::vector<std::vector<CheckOutcome>> per_trial(static_cast<std::size_t>(opt.trials));
    detail::parallel_for(opt.trials, opt.workers, [&](int t) {
        Rng rng(trial_seed(suite_seed, static_cast<std::uint64_t>(t)));
        verify::Recorder rec(tol);
        try {
            body(rng, t, rec, opt.mutation);
        } catch (const std::exception& e) {
            rec.holds("trial completed without error", false, e.what());
        }
        per_trial[static_cast<std::size_t>(t)] = rec.take();
    });

    SuiteResult r;
    r.suite = name;
    r.trials = opt.trials;
    std::map<std::string, std::size_t> slot;
    for (int t = 0; t < opt.trials; ++t)
        for (const auto& o : per_trial[static_cast<std::size_t>(t)]) {
            auto [it, fresh] = slot.try_emplace(o.identity, r.identities.size());
            if (fresh) r.identities.push_back({o.identity, 0, 0});
            auto& tally = r.identities[it->second];
            if (o.ok) {
                ++tally.passed;
                continue;
            }
            ++tally.failed;
            ++r.total_failures;
            if (static_cast<int>(r.failures.size()) < opt.max_failure_records)
                r.failures.push_back({o.identity, t, trial_seed(suite_seed, static_cast<std::uint64_t>(t)), o.lhs, o.rhs});
        }
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline SuiteResult run_suite(const std::string& name, const VerifyOptions& opt, bool exact) {
    return exact ? run_suite<Rational>(name, opt) : run_suite<double>(name, opt);
}

// Report without timings so equal seeds give byte-identical output.
inline Json as_json(const SuiteResult& r) {
    Json ids = Json::array(), fails = Json::array();
    for (const auto& t : r.identities) ids.push_back({{"identity", t.identity}, {"passed", t.passed}, {"failed", t.failed}});
    for (const auto& f : r.failures)
        fails.push_back({{"identity", f.identity}, {"trial", f.trial}, {"trial_seed", f.trial_seed}, {"lhs", f.lhs}, {"rhs", f.rhs}});
    return Json{{"suite", r.suite}, {"trials", r.trials}, {"passed", r.ok()}, {"checks", r.checks()},
                {"failures_total", r.total_failures}, {"identities", ids}, {"failures", fails}};
}

}  // namespace spectral_torsion
