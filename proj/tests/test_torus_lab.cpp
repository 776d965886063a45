#include <gtest/gtest.h>

#include <spectral_torsion/random.hpp>
#include <spectral_torsion/torus_lab.hpp>

using namespace spectral_torsion;

namespace {

constexpr double kPi = std::numbers::pi;

Tensor<double> axial(double scale, int missing = 3) {
    std::array<int, 3> idx{};
    int n = 0;
    for (int i = 0; i < 4; ++i)
        if (i != missing) idx[n++] = i;
    Tensor<double> t(4, 3);
    for (const auto& sp : detail::permutations(3)) {
        MultiIndex m{};
        for (int s = 0; s < 3; ++s) m[s] = idx[sp.perm[s]];
        t.at(m) = sp.sign * scale;
    }
    return t;
}

Tensor<double> vec(double a, double b, double c, double d) {
    Tensor<double> v(4, 1);
    v(0) = a;
    v(1) = b;
    v(2) = c;
    v(3) = d;
    return v;
}

std::vector<double> times(double lo, double hi, int n = 10) {
    std::vector<double> t;
    for (int i = 0; i < n; ++i) t.push_back(lo + (hi - lo) * i / (n - 1));
    return t;
}

PeriodicField zero_vector() { return PeriodicField(1); }
PeriodicField zero_form() { return PeriodicField(3); }

}  // namespace

TEST(PeriodicField, ExactIntegrals) {
    Tensor<double> one(4, 0);
    one[0] = 1;
    EXPECT_DOUBLE_EQ(exact_integral(PeriodicField::constant(one)), torus_volume());
    PeriodicField c(0);
    c.add_mode({1, 0, 0, 0}, one, Tensor<double>(4, 0));
    EXPECT_EQ(exact_integral(c), 0.0);

    PeriodicField v(1);
    v.add_mode({1, 0, 0, 0}, vec(1, 0, 0, 0), Tensor<double>(4, 1));
    auto sq = grid_integrals(v, zero_form(), 3, 1, [](const TorsionJet<double>& j) {
        return std::vector<double>{j.V(0) * j.V(0)};
    }, 1, 2);
    EXPECT_NEAR(sq[0], torus_volume() / 2, 1e-12 * torus_volume());
}

TEST(PeriodicField, GradientMatchesFiniteDifferences) {
    PeriodicField t(3);
    t.add_mode({0, 1, 0, 2}, axial(0.7), axial(-0.3, 0));
    t.add_mode({1, 0, -1, 0}, axial(0.2, 1), axial(0.5, 2));
    TorusPoint x{0.3, 1.1, -0.4, 2.0};
    auto g = t.gradient(x);
    double h = 1e-6;
    for (int a = 0; a < 4; ++a) {
        TorusPoint xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        auto fd = (t.value(xp) - t.value(xm)) * (1 / (2 * h));
        for (std::size_t f = 0; f < 64; ++f) ASSERT_NEAR(g[a * 64 + f], fd[f], 1e-8);
    }
}

TEST(PeriodicField, RejectsBadModes) {
    PeriodicField t(3);
    Tensor<double> bad(4, 3);
    bad(0, 1, 2) = 1;
    EXPECT_THROW(t.add_mode({1, 0, 0, 0}, bad, Tensor<double>(4, 3)), PreconditionError);
    EXPECT_THROW(t.add_mode({1, 0, 0, 0}, vec(1, 0, 0, 0), vec(0, 0, 0, 0)), ShapeError);
    EXPECT_THROW(PeriodicField(4), ShapeError);
}

TEST(IntegralSuite, RefusesCoarseGrid) {
    PeriodicField t(3);
    t.add_mode({0, 0, 0, 1}, axial(1), Tensor<double>(4, 3));
    try {
        integral_identity_suite(zero_vector(), t, nullptr, 4);
        FAIL() << "expected refusal";
    } catch (const NumericalGuard& e) {
        EXPECT_NE(std::string(e.what()).find("need at least 5"), std::string::npos);
    }
}

TEST(IntegralSuite, ConstantFields) {
    auto r = integral_identity_suite(PeriodicField::constant(vec(0.3, -0.2, 0.5, 0.7)),
                                     PeriodicField::constant(axial(0.4) + axial(-0.6, 0)));
    for (const auto& i : r.identities) EXPECT_TRUE(i.holds()) << i.name << " " << i.lhs << " vs " << i.rhs;
    // The opposite sign convention for the mixed summand fails once <T,*V> != 0.
    EXPECT_GT(r.mixed_same_sign_residual, 1e-3);
}

TEST(IntegralSuite, SingleModeTorsion) {
    PeriodicField t(3);
    t.add_mode({0, 0, 0, 1}, axial(1), Tensor<double>(4, 3));
    auto r = integral_identity_suite(zero_vector(), t);
    EXPECT_TRUE(r.at("curvature_norm").holds()) << r.at("curvature_norm").residual();
    EXPECT_GT(r.at("curvature_norm").lhs, 0);
    EXPECT_TRUE(r.all_hold());
}

TEST(IntegralSuite, SingleModeVector) {
    PeriodicField v(1);
    v.add_mode({0, 1, 0, 0}, Tensor<double>(4, 1), vec(1, 0, 0, 0));
    auto r = integral_identity_suite(v, zero_form());
    EXPECT_TRUE(r.at("euler_combination").holds()) << r.at("euler_combination").residual();
    EXPECT_TRUE(r.all_hold());
}

TEST(IntegralSuite, TwoModeFieldsWithConstantTwist) {
    PeriodicField v(1), t(3);
    v.add_mode({0, 1, 0, 0}, vec(0.5, 0, 0.25, 0), vec(1, 0, 0, -0.5));
    v.add_mode({1, 0, 0, 0}, vec(0, 0.75, 0, 0.5), vec(0, 0, 0.5, -0.25));
    t.add_mode({1, 0, 0, 0}, axial(1), axial(0.5, 1));
    t.add_mode({1, 1, 0, 0}, axial(0.25, 2), axial(-0.5, 0));
    Rng rng(3);
    auto twist = to_double(random_constant_twist<Rational>(rng, 2));
    auto r = integral_identity_suite(v, t, &twist);
    for (const auto& i : r.identities) EXPECT_TRUE(i.holds()) << i.name << " residual " << i.residual();
    EXPECT_GT(std::fabs(r.at("ricci_antisymmetric_summand").lhs), 1e-3);
    EXPECT_GT(std::fabs(r.at("mixed_summand").lhs), 1e-3);
    EXPECT_GT(std::fabs(r.at("twisted_a4").lhs), 1e-6);
}

TEST(IntegralSuite, DeterministicAcrossWorkers) {
    PeriodicField v(1), t(3);
    v.add_mode({0, 1, 0, 0}, vec(0.5, 0, 0.25, 0), vec(1, 0, 0, -0.5));
    t.add_mode({1, 0, 0, 1}, axial(1), axial(0.5, 1));
    auto a = integral_identity_suite(v, t, nullptr, 0, 1);
    auto b = integral_identity_suite(v, t, nullptr, 0, 3);
    for (std::size_t i = 0; i < a.identities.size(); ++i) {
        EXPECT_EQ(a.identities[i].lhs, b.identities[i].lhs);
        EXPECT_EQ(a.identities[i].rhs, b.identities[i].rhs);
    }
}

TEST(DiracMode, Examples) {
    TorusSpec s;
    EXPECT_TRUE(dirac_mode_matrix(s, {0, 0, 0, 0}).H.isZero());
    EXPECT_TRUE(dirac_mode_matrix(s, {1, 0, 0, 0}).H.isApprox(Mode4::Identity()));

    s.T = axial(1);
    auto m = dirac_mode_matrix(s, {0, 0, 0, 0});
    Mode4 t = detail::to_eigen(act_form(s.T));
    EXPECT_TRUE(m.H.isApprox(t.adjoint() * t * 2.25));
    Eigen::ComplexEigenSolver<Mode4> brute(m.H);
    std::vector<double> ev;
    for (int i = 0; i < 4; ++i) ev.push_back(brute.eigenvalues()(i).real());
    std::sort(ev.begin(), ev.end());
    Eigen::SelfAdjointEigenSolver<Mode4> herm(m.H);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(herm.eigenvalues()(i), ev[static_cast<std::size_t>(i)], 1e-12);
}

TEST(DiracMode, HermitianPositiveWithVector) {
    TorusSpec s;
    s.V = vec(0.7, 0, 0, 0);
    s.T = axial(0.3, 1);
    for (int k0 = -2; k0 <= 2; ++k0)
        for (int k3 = -2; k3 <= 2; ++k3) {
            auto m = dirac_mode_matrix(s, {k0, 1, 0, k3});
            EXPECT_FALSE(m.A.isApprox(m.A.adjoint()));
            EXPECT_TRUE(m.H.isApprox(m.H.adjoint()));
            EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mode4>(m.H).eigenvalues()(0), -1e-12);
        }
}

TEST(HeatTrace, FreeOperatorMatchesThetaFunction) {
    TorusSpec s;
    s.times = times(0.05, 0.25);
    auto h = torus_heat_trace(s);
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        double theta = 0;
        for (int n = -200; n <= 200; ++n) theta += std::exp(-s.times[i] * n * n);
        EXPECT_NEAR(h.values[i], 4 * std::pow(theta, 4), 1e-12 * h.values[i]);
    }
    auto r = fit_heat_trace(h.times, h.values, torus_analytic(s));
    EXPECT_LT(r.rel_err[0], 1e-6);
    EXPECT_LT(std::fabs(r.a_hat[1]), 1e-6 * r.a_hat[0]);
    EXPECT_LT(std::fabs(r.a_hat[2]), 1e-3 * r.a_hat[0]);
}

TEST(HeatTrace, ConstantAxialTorsion) {
    TorusSpec s;
    s.T = axial(1);
    s.times = times(0.1, 0.5);
    auto r = heat_trace_fit(s);
    EXPECT_NEAR(r.analytic[1], 18 * kPi * kPi, 1e-9);
    EXPECT_LT(r.rel_err[0], 1e-6);
    EXPECT_LT(r.rel_err[1], 1e-2);
    EXPECT_LT(std::fabs(r.a_hat[2]), 1e-2 * std::fabs(r.a_hat[1]));
    EXPECT_LT(r.residual, 1e-6 * r.a_hat[0]);
}

TEST(HeatTrace, ConstantVector) {
    TorusSpec s;
    double v = 0.8;
    s.V = vec(v, 0, 0, 0);
    s.times = times(0.1, 0.5);
    auto r = heat_trace_fit(s);
    EXPECT_NEAR(r.analytic[1], 18 * kPi * kPi * v * v, 1e-9);
    EXPECT_LT(r.rel_err[1], 1e-2);
}

TEST(HeatTrace, ChiralTraceHasNoScalarHolstTerm) {
    // Constant T and V with <T,*V> != 0: the Holst form is a nonzero constant.
    TorusSpec s;
    s.T = axial(0.3);
    s.V = vec(0, 0, 0, 0.5);
    s.times = times(0.1, 0.5);
    s.chiral = true;
    auto r = heat_trace_fit(s);
    JetFields<double> f = JetFields<double>::zero(4);
    f.T = s.T;
    f.V = s.V;
    auto rep = integrate_constant(chiral_coeffs(build_jet(f)), 16.0, 4);
    double scalar_holst = *rep.term("scalar_holst", 4) * std::pow(kPi, rep.pi_power);
    EXPECT_GT(std::fabs(scalar_holst), 1);
    EXPECT_LT(r.rel_err[1], 1e-2);
    EXPECT_EQ(r.analytic[2], 0.0);
    EXPECT_LT(std::fabs(r.a_hat[2]), 1e-3 * std::fabs(scalar_holst));
}

TEST(HeatTrace, IndependentOfWorkerCount) {
    TorusSpec s;
    s.T = axial(0.5);
    s.V = vec(0.1, 0.2, 0, 0);
    s.times = times(0.3, 1.0, 4);
    s.workers = 1;
    auto a = torus_heat_trace(s);
    s.workers = 4;
    auto b = torus_heat_trace(s);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.modes, b.modes);
}

TEST(HeatTrace, TruncationStability) {
    TorusSpec s;
    s.T = axial(1);
    s.times = times(0.2, 1.0, 4);
    auto a = torus_heat_trace(s);
    s.cutoff = static_cast<int>(std::ceil(1.25 * a.cutoff));
    auto b = torus_heat_trace(s);
    EXPECT_LT(std::fabs(a.values[0] - b.values[0]), 1e-10 * b.values[0]);
}

TEST(HeatTrace, RejectsBadConfiguration) {
    TorusSpec s;
    s.times = {0.2, 0.1};
    EXPECT_THROW(torus_heat_trace(s), ConfigError);
    s.times = times(0.1, 0.5);
    s.cutoff = 5;
    EXPECT_THROW(torus_heat_trace(s), NumericalGuard);
    s.cutoff = 0;
    s.T = Tensor<double>(4, 3);
    s.T(0, 1, 2) = 1;
    EXPECT_THROW(torus_heat_trace(s), PreconditionError);
}

TEST(HeatFit, GuardsConditioningAndMonotonicity) {
    std::vector<double> t{1.0, 1.0 + 1e-7, 1.0 + 2e-7};
    std::vector<double> f{3.0, 2.9999999, 2.9999998};
    EXPECT_THROW(fit_heat_trace(t, f, {0, 0, 0}), NumericalGuard);
    EXPECT_THROW(fit_heat_trace({0.1, 0.2, 0.3}, {1.0, 2.0, 0.5}, {0, 0, 0}), NumericalGuard);
}

TEST(Sphere, Benchmark) {
    auto r = sphere_benchmark();
    EXPECT_NEAR(r.analytic[0], 2.0 / 3, 1e-15);
    EXPECT_NEAR(r.analytic[1], -2.0 / 3, 1e-15);
    EXPECT_LT(r.rel_err[0], 1e-5);
    EXPECT_LT(r.rel_err[1], 1e-3);
    EXPECT_NEAR(r.a_hat[1] / r.a_hat[0], -1, 1e-3);
    // Euler term of the closed form: 11/90 on the unit sphere.
    EXPECT_NEAR(r.analytic[2], 11.0 / 90, 1e-14);
}

TEST(Sphere, RejectsBadSpectrumData) {
    auto levels = round_s4_spectrum(400);
    for (auto& l : levels) l.multiplicity *= 1.01;
    EXPECT_THROW(sphere_benchmark(levels), InvariantViolation);
    EXPECT_THROW(sphere_benchmark(round_s4_spectrum(30)), NumericalGuard);
}
