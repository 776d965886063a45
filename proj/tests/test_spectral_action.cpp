#include <gtest/gtest.h>

#include <spectral_torsion/random.hpp>
#include <spectral_torsion/spectral_action.hpp>

using namespace spectral_torsion;
using Q = Rational;
using C = GaussianRational;
using CM = CMatrix<Q>;

namespace {

TorsionJet<Q> constant_jet(const Tensor<Q>& v, const Tensor<Q>& t) {
    auto f = JetFields<Q>::zero(4);
    f.V = v;
    f.T = t;
    return build_jet(f);
}

Tensor<Q> e123() {
    Tensor<Q> t(4, 3);
    for (const auto& sp : detail::permutations(3)) {
        MultiIndex idx{};
        for (int s = 0; s < 3; ++s) idx[s] = sp.perm[s];
        t.at(idx) = sp.sign;
    }
    return t;
}

TorsionJet<Q> torsion_free_jet(Rng& rng, bool flat_laplacian) {
    auto f = random_jet_fields<Q>(rng);
    f.V = Tensor<Q>(4, 1);
    f.gradV = Tensor<Q>(4, 2);
    f.T = Tensor<Q>(4, 3);
    f.gradT = Tensor<Q>(4, 4);
    if (flat_laplacian) f.lapRg = 0;
    return build_jet(f);
}

const std::vector<std::string> kChiralTerms = {"holst", "pontryagin", "scalar_holst", "pontryagin_slot_correction",
                                               "higgs_holst", "chiral_yang_mills"};

bool is_chiral_term(const std::string& name) {
    return std::find(kChiralTerms.begin(), kChiralTerms.end(), name) != kChiralTerms.end();
}

}  // namespace

TEST(Gilkey, TrivialFiber) {
    auto z = zero_jet<Q>();
    auto r = gilkey_densities(CM(4, 4), TwistData<Q>::zero_field_strength(4), 4, z);
    EXPECT_EQ(r.a0, Q(1, 4));
    EXPECT_EQ(r.a2, Q(0));
    EXPECT_EQ(r.a4, Q(0));
    EXPECT_EQ(r.pi_power, -2);
    EXPECT_TRUE(r.breakdown_consistent());
}

TEST(Gilkey, ScalarPotentialOnLineBundle) {
    CM e(1, 1);
    e(0, 0) = C(Q(5, 3));
    auto r = gilkey_densities(e, TwistData<Q>::zero_field_strength(1), 1, zero_jet<Q>());
    EXPECT_EQ(r.a2, Q(5, 48));
    EXPECT_EQ(r.a4, Q(180) * Q(25, 9) / Q(5760));
}

TEST(Gilkey, RejectsMismatchedFiber) {
    EXPECT_THROW(gilkey_densities(CM(3, 3), TwistData<Q>::zero_field_strength(4), 4, zero_jet<Q>()), ShapeError);
    EXPECT_THROW(gilkey_densities(CM(4, 4), TwistData<Q>::zero_field_strength(2), 4, zero_jet<Q>()), ShapeError);
}

TEST(Gilkey, SecondCoefficientIsModifiedScalarCurvature) {
    Rng rng(1);
    for (int trial = 0; trial < 30; ++trial) {
        auto j = random_jet<Q>(rng);
        EXPECT_EQ(dstar_d_generic(j).a2, dstar_d_coeffs(j).a2);
        EXPECT_EQ(chiral_generic(j).a2, chiral_coeffs(j).a2);
    }
}

TEST(DstarD, ConstantAxialTorsion) {
    auto r = dstar_d_coeffs(constant_jet(Tensor<Q>(4, 1), e123()));
    EXPECT_EQ(r.a2, Q(9, 8));
    EXPECT_EQ(r.a4, Q(0));
    EXPECT_EQ(r.a0, Q(1, 4));
}

TEST(DstarD, RoundSphereSecondCoefficient) {
    auto f = JetFields<Q>::zero(4);
    auto g = metric<Q>(4);
    f.riem_g = kn_product(g, g) * Q(-1, 2);
    auto r = integrate_constant(dstar_d_coeffs(build_jet(f)), Q(8, 3), 2);
    EXPECT_EQ(r.pi_power, 0);
    EXPECT_EQ(r.a2, Q(-2, 3));
    EXPECT_EQ(r.a0, Q(2, 3));
    EXPECT_TRUE(r.breakdown_consistent());
}

TEST(DstarD, ZeroJetOnlyVolume) {
    auto r = dstar_d_coeffs(zero_jet<Q>());
    EXPECT_NE(r.a0, Q(0));
    EXPECT_EQ(r.a2, Q(0));
    EXPECT_EQ(r.a4, Q(0));
}

TEST(DstarD, GenericMatchesClosedFormWithoutTorsion) {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        auto j = torsion_free_jet(rng, true);
        auto closed = dstar_d_coeffs(j), generic = dstar_d_generic(j);
        ASSERT_EQ(closed.a4, generic.a4);
        ASSERT_EQ(chiral_coeffs(j).a4, chiral_generic(j).a4);
    }
}

TEST(DstarD, GenericMatchesClosedFormAtConstantTorsion) {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto j = random_constant_flat_jet<Q>(rng);
        auto closed = dstar_d_coeffs(j), generic = dstar_d_generic(j);
        ASSERT_EQ(closed.a0, generic.a0);
        ASSERT_EQ(closed.a2, generic.a2);
        ASSERT_EQ(closed.a4, generic.a4);
        auto cc = chiral_coeffs(j), cg = chiral_generic(j);
        ASSERT_EQ(cc.a2, cg.a2);
        ASSERT_EQ(cc.a4, cg.a4);
    }
}

TEST(Holst, Examples) {
    EXPECT_EQ(holst_term(zero_jet<Q>()).density, Q(0));
    auto j = constant_jet(basis_vector<Q>(4, 3), e123());
    EXPECT_EQ(torsion_axial_pairing(j), Q(-6));
    auto h = holst_term(j);
    EXPECT_EQ(h.form, volume_form<Q>(4) * Q(108));
    EXPECT_EQ(h.density, Q(108));
}

TEST(Holst, ModifiedScalingOfTheUnmodifiedForm) {
    Rng rng(4);
    auto j = random_jet<Q>(rng);
    auto m = modified_jet(j);
    Tensor<Q> unmodified = m.dT * Q(6) - volume_form<Q>(4) * (Q(2) * torsion_axial_pairing(m));
    EXPECT_EQ(unmodified, holst_term(j).form);
}

TEST(Chiral, SecondCoefficientSplitsIntoHalves) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto j = random_jet<Q>(rng);
        Q trEw = trace_suite(j).trEw.re;
        EXPECT_EQ(chiral_coeffs(j).a2, dstar_d_coeffs(j).a2 / 2 + trEw / 32);
    }
    auto z = torsion_free_jet(rng, false);
    auto f = z.fields();
    f.riem_g = Tensor<Q>(4, 4);
    EXPECT_EQ(chiral_coeffs(build_jet(f)).a2, Q(0));
}

TEST(Chiral, ScalarHolstTermVanishesWithoutHolstForm) {
    auto j = constant_jet(basis_vector<Q>(4, 0), Tensor<Q>(4, 3));
    EXPECT_EQ(*chiral_coeffs(j).term("scalar_holst", 4), Q(0));
}

TEST(TwistPotential, UntwistedReducesToSpinorPotential) {
    Rng rng(6);
    auto j = random_jet<Q>(rng);
    auto t = TwistData<Q>::trivial(3);
    t.gamma_diag = {1, -1, 1};
    auto r = twist_potential(j, t);
    EXPECT_EQ(r.E_phi, kron(potential_E(j).E, CM::identity(3)));
    auto s = trace_suite(j);
    EXPECT_EQ(r.trE, s.trE * C(3));
    EXPECT_EQ(r.trE2, s.trE2 * C(3));
    EXPECT_EQ(r.trEw, s.trEw);
}

TEST(TwistPotential, ClosedFormsOnRandomPairs) {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        auto j = random_jet<Q>(rng);
        auto t = random_twist<Q>(rng, 1 + trial % 3);
        auto r = twist_potential(j, t);
        for (const auto& c : r.checks()) ASSERT_TRUE(c.holds()) << trial << " " << c.name << ": " << c.lhs << " vs " << c.rhs;
        ASSERT_EQ(r.trEw, trace_suite(j).trEw * C(Q(t.gamma_trace())));
    }
}

TEST(TwistPotential, UnitWeightsMissTheFieldStrength) {
    Rng rng(8);
    auto j = random_jet<Q>(rng);
    auto t = random_twist<Q>(rng, 2);
    auto r = twist_potential(j, t);
    EXPECT_NE(r.trE2.re, r.trE2_unit_weights);
    EXPECT_EQ(r.trE2.re, r.trE2_closed);
}

TEST(TwistPotential, SuppliedDirectionalDerivativeIsUsed) {
    Rng rng(9);
    auto j = random_jet<Q>(rng);
    auto t = random_twist<Q>(rng, 2);
    auto r0 = twist_potential(j, t);
    t.dV_phi2 = twist_dV_phi2(j, t) + Q(1);
    EXPECT_EQ(twist_potential(j, t).trE2_closed, r0.trE2_closed + Q(12));
}

TEST(TwistValidation, RejectsBrokenInvariants) {
    Rng rng(10);
    auto good = random_twist<Q>(rng, 2);
    EXPECT_NO_THROW(validate(good));

    auto t = good;
    t.gamma_diag = {1, 2};
    EXPECT_THROW(validate(t), InvariantViolation);

    t = good;
    t.gamma_diag = {1, -1};
    t.Omega[0][1](0, 1) = C(1);
    t.Omega[0][1](1, 0) = C(-1);
    t.Omega[1][0] = -t.Omega[0][1];
    try {
        validate(t);
        FAIL() << "expected rejection";
    } catch (const InvariantViolation& e) {
        EXPECT_EQ(e.identity, "gamma commutes with Omega");
    }

    t = good;
    t.Omega[2][3] = t.Omega[3][2];
    EXPECT_THROW(validate(t), InvariantViolation);

    t = good;
    t.Phi(0, 1) = t.Phi(0, 1) + C(Q(0), Q(1));
    EXPECT_THROW(validate(t), InvariantViolation);

    t = good;
    t.Phi = CM(3, 3);
    EXPECT_THROW(validate(t), ShapeError);
}

TEST(Hplus, TrivialTwistIsChiralOperator) {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        auto j = random_jet<Q>(rng);
        auto h = hplus_coeffs(j, TwistData<Q>::trivial(1));
        auto c = chiral_coeffs(j);
        EXPECT_EQ(h.a0, c.a0);
        EXPECT_EQ(h.a2, c.a2);
        EXPECT_EQ(h.a4, c.a4);
        auto hg = hplus_generic(j, TwistData<Q>::trivial(1));
        auto cg = chiral_generic(j);
        EXPECT_EQ(hg.a4, cg.a4);
    }
}

TEST(Hplus, VolumeAndSecondCoefficient) {
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        auto j = random_jet<Q>(rng);
        auto t = random_twist<Q>(rng, 3);
        auto h = hplus_coeffs(j, t);
        EXPECT_EQ(h.a0, Q(3, 8));
        auto g = geometric_invariants(j);
        Q trPhi2 = trace(CM(t.Phi * t.Phi)).re;
        EXPECT_EQ(h.a2, Q(-1, 32) * (g.Rtilde + Q(t.gamma_trace()) / 3 * g.holst) - trPhi2 / 8);
        EXPECT_EQ(h.a2, hplus_generic(j, t).a2);
        t.Phi = CM(3, 3);
        auto c = chiral_coeffs(j);
        EXPECT_EQ(hplus_coeffs(j, t).a2, Q(3) * *c.term("scalar_curvature", 2) + Q(t.gamma_trace()) * *c.term("holst", 2));
    }
}

TEST(Hplus, ChiralitySignFlipsOnlyChiralTerms) {
    Rng rng(13);
    auto j = random_jet<Q>(rng);
    auto t = random_twist<Q>(rng, 3);
    auto flipped = t;
    for (auto& s : flipped.gamma_diag) s = -s;
    auto a = hplus_coeffs(j, t), b = hplus_coeffs(j, flipped);
    ASSERT_EQ(a.terms.size(), b.terms.size());
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        const auto& x = a.terms[i];
        const auto& y = b.terms[i];
        ASSERT_EQ(x.name, y.name);
        if (is_chiral_term(x.name))
            EXPECT_EQ(x.value, -y.value) << x.name;
        else
            EXPECT_EQ(x.value, y.value) << x.name;
    }
}

TEST(Hplus, FullyChiralFiberWeightsDualFieldTrace) {
    Rng rng(14);
    auto t = random_twist<Q>(rng, 2);
    t.gamma_diag = {-1, -1};
    Q expected = Q(-1, 64) * dual_field_trace(t.Omega, CM::identity(2)).re;
    EXPECT_EQ(*hplus_coeffs(zero_jet<Q>(), t).term("chiral_yang_mills", 4), expected);
}

TEST(Hplus, BalancedChiralityDropsChiralTerms) {
    Rng rng(15);
    auto j = random_jet<Q>(rng);
    auto t = random_twist<Q>(rng, 2);
    t.gamma_diag = {1, -1};
    for (auto& row : t.Omega)
        for (auto& w : row) w = chirality_block(w, t.gamma_diag);
    // Φ exchanging the two chiralities makes Φ² chirality-even with tr(Φ²γ) = 0.
    t.Phi = CM(2, 2);
    t.Phi(0, 1) = C(Q(2), Q(1));
    t.Phi(1, 0) = C(Q(2), Q(-1));
    auto h = hplus_coeffs(j, t);
    for (const auto& name : {"holst", "pontryagin", "scalar_holst", "pontryagin_slot_correction", "higgs_holst"}) {
        int order = std::string(name) == "holst" ? 2 : 4;
        EXPECT_EQ(*h.term(name, order), Q(0)) << name;
    }
}

TEST(Hplus, GenericMatchesClosedFormAtConstantFieldsAndTwist) {
    Rng rng(16);
    for (int trial = 0; trial < 30; ++trial) {
        auto j = random_constant_flat_jet<Q>(rng);
        auto t = random_constant_twist<Q>(rng, 1 + trial % 3);
        ASSERT_EQ(twist_dV_phi2(j, t), Q(0));
        auto closed = hplus_coeffs(j, t), generic = hplus_generic(j, t);
        ASSERT_EQ(closed.a0, generic.a0);
        ASSERT_EQ(closed.a2, generic.a2);
        ASSERT_EQ(closed.a4, generic.a4) << "trial " << trial;
    }
}

TEST(Hplus, GenericMatchesClosedFormWithoutTorsion) {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        auto j = torsion_free_jet(rng, true);
        auto t = random_twist<Q>(rng, 2);
        ASSERT_EQ(hplus_coeffs(j, t).a4, hplus_generic(j, t).a4);
    }
}

TEST(Reports, BreakdownSumsToCoefficients) {
    Rng rng(18);
    auto j = random_jet<Q>(rng);
    auto t = random_twist<Q>(rng, 2);
    for (const auto& r : {dstar_d_coeffs(j), chiral_coeffs(j), hplus_coeffs(j, t), hplus_generic(j, t)})
        EXPECT_TRUE(r.breakdown_consistent()) << r.operator_name << " " << r.method;
}

TEST(BarberoImmirzi, Values) {
    auto t = TwistData<Q>::trivial(4);
    t.gamma_diag = {1, 1, 1, -1};
    EXPECT_EQ(barbero_immirzi(t), Q(-2));
    t = TwistData<Q>::trivial(3);
    t.gamma_diag = {-1, -1, -1};
    EXPECT_EQ(barbero_immirzi(t), Q(1));
    t = TwistData<Q>::trivial(2);
    t.gamma_diag = {1, -1};
    EXPECT_THROW(barbero_immirzi(t), ChiralSymmetricError);
}

TEST(BarberoImmirzi, ModulusAtLeastOne) {
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        auto t = TwistData<Q>::trivial(1 + trial % 6);
        t.gamma_diag = random_gamma<Q>(rng, t.m);
        if (t.gamma_trace() == 0) continue;
        Q b = barbero_immirzi(t);
        EXPECT_GE(abs(b), Q(1));
    }
}

TEST(CutoffAction, Assembly) {
    SeeleyReport<Q> r;
    r.integrated = true;
    r.pi_power = 0;
    r.add(0, "volume", Q(2));
    r.add(2, "scalar_curvature", Q(3));
    r.add(4, "euler", Q(5));
    EXPECT_DOUBLE_EQ(cc_action(r, CutoffMoments{1, 1, 1, 1}), 10.0);
    EXPECT_DOUBLE_EQ(cc_action(r, CutoffMoments{0, 0, 1, 7}), 5.0);
    EXPECT_DOUBLE_EQ(cc_action(r, CutoffMoments{1, 1, 0, 2}), 16 * 2.0 + 4 * 3.0);
    EXPECT_THROW(cc_action(r, CutoffMoments{1, 1, 1, 0}), PreconditionError);
    EXPECT_THROW(cc_action(r, CutoffMoments{-1, 1, 1, 1}), PreconditionError);
    r.integrated = false;
    EXPECT_THROW(cc_action(r, CutoffMoments{}), PreconditionError);
}

TEST(SpectralAction, FloatBackendAgrees) {
    Rng rng(20);
    auto j = random_jet<Q>(rng);
    auto jd = build_jet(to_double(j.fields()));
    auto exact = chiral_coeffs(j);
    auto approx = chiral_coeffs(jd);
    EXPECT_NEAR(approx.a4, exact.a4.get_d(), 1e-9 * std::abs(exact.a4.get_d()) + 1e-12);
    EXPECT_NEAR(chiral_generic(jd).a2, exact.a2.get_d(), 1e-9 * std::abs(exact.a2.get_d()) + 1e-12);
}
