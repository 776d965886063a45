#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clifford.hpp"

namespace spectral_torsion {

// ---------------------------------------------------------------------------
// Twist bundle data at a point: chirality γ, Higgs endomorphism Φ, its covariant
// derivatives G_i = [∇_i, Φ] and the field strength Ω_ij.

template <RealScalar R>
using FieldStrength = std::array<std::array<CMatrix<R>, 4>, 4>;

template <RealScalar R>
struct TwistData {
    int m = 1;
    std::vector<int> gamma_diag{1};
    CMatrix<R> Phi = CMatrix<R>(1, 1);
    std::array<CMatrix<R>, 4> gradPhi{CMatrix<R>(1, 1), CMatrix<R>(1, 1), CMatrix<R>(1, 1), CMatrix<R>(1, 1)};
    FieldStrength<R> Omega = zero_field_strength(1);
    // ∂_V tr(Φ²); when absent it is 2 Σ_i V_i Re tr(Φ G_i).
    std::optional<R> dV_phi2;

    static FieldStrength<R> zero_field_strength(int m) {
        FieldStrength<R> f;
        for (auto& row : f)
            for (auto& x : row) x = CMatrix<R>(m, m);
        return f;
    }

    static TwistData trivial(int m = 1) {
        TwistData t;
        t.m = m;
        t.gamma_diag.assign(static_cast<std::size_t>(m), 1);
        t.Phi = CMatrix<R>(m, m);
        for (auto& g : t.gradPhi) g = CMatrix<R>(m, m);
        t.Omega = zero_field_strength(m);
        return t;
    }

    CMatrix<R> gamma() const {
        std::vector<Gaussian<R>> d;
        for (int s : gamma_diag) d.emplace_back(R(s));
        return CMatrix<R>::diagonal(d);
    }
    int gamma_trace() const {
        int t = 0;
        for (int s : gamma_diag) t += s;
        return t;
    }
};

namespace detail {

template <RealScalar R>
bool hermitian_near(const CMatrix<R>& a, int sign) {
    return near(adjoint(a), sign > 0 ? a : CMatrix<R>(-a), Tolerance{1e-12, 1e-10});
}

}  // namespace detail

template <RealScalar R>
void validate(const TwistData<R>& t) {
    auto square = [&](const CMatrix<R>& x, const std::string& name) {
        if (x.rows() != t.m || x.cols() != t.m)
            throw ShapeError("twist " + name + " must be " + std::to_string(t.m) + "x" + std::to_string(t.m));
    };
    if (t.m < 1) throw ShapeError("twist rank must be positive");
    if (static_cast<int>(t.gamma_diag.size()) != t.m) throw ShapeError("twist gamma_diag must have m entries");
    for (int s : t.gamma_diag)
        if (s != 1 && s != -1) throw InvariantViolation("gamma squared", "gamma entries must be +1 or -1");
    square(t.Phi, "Phi");
    if (!detail::hermitian_near(t.Phi, +1)) throw InvariantViolation("Phi self-adjoint", "Phi is not Hermitian");
    for (int i = 0; i < 4; ++i) {
        square(t.gradPhi[i], "gradPhi[" + std::to_string(i) + "]");
        if (!detail::hermitian_near(t.gradPhi[i], +1))
            throw InvariantViolation("gradPhi self-adjoint", "gradPhi[" + std::to_string(i) + "] is not Hermitian");
    }
    CMatrix<R> g = t.gamma();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const auto& w = t.Omega[i][j];
            std::string at = "Omega[" + std::to_string(i) + "][" + std::to_string(j) + "]";
            square(w, at);
            if (!near(w, CMatrix<R>(-t.Omega[j][i]), Tolerance{1e-12, 1e-10}))
                throw InvariantViolation("Omega antisymmetry", at + " != -Omega[j][i]");
            if (!detail::hermitian_near(w, -1)) throw InvariantViolation("Omega skew-adjoint", at);
            if (!commutator(w, g).is_zero() && !near(commutator(w, g), CMatrix<R>(t.m, t.m), Tolerance{1e-12, 1e-10}))
                throw InvariantViolation("gamma commutes with Omega", at);
        }
}

template <RealScalar R>
R twist_dV_phi2(const TorsionJet<R>& j, const TwistData<R>& t) {
    if (t.dV_phi2) return *t.dV_phi2;
    R s = RealTraits<R>::zero();
    for (int i = 0; i < 4; ++i) s += R(ratio<R>(2, 1) * j.V(i) * trace(CMatrix<R>(t.Phi * t.gradPhi[i])).re);
    return s;
}

// Σ_kl tr((⋆̂Ω)_kl Ω_kl W) with the unnormalized dual (⋆̂Ω)_kl = Σ_ij ε_ijkl Ω_ij.
template <RealScalar R>
Gaussian<R> dual_field_trace(const FieldStrength<R>& om, const CMatrix<R>& weight) {
    Gaussian<R> total(0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    std::array<int, 4> idx{i, j, k, l};
                    int e = levi_civita(idx);
                    if (e == 0) continue;
                    Gaussian<R> tr = trace(CMatrix<R>(om[i][j] * om[k][l] * weight));
                    total += e > 0 ? tr : -tr;
                }
    return total;
}

template <RealScalar R>
Gaussian<R> field_square_trace(const FieldStrength<R>& om) {
    Gaussian<R> total(0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) total += trace(CMatrix<R>(om[i][j] * om[i][j]));
    return total;
}

// ---------------------------------------------------------------------------
// Twisted potential on spinors ⊗ H, spinor index slow.

template <RealScalar R>
struct TwistTraces {
    using C = Gaussian<R>;
    CMatrix<R> E_phi;
    C trE, trEw, trE2, trE2w;  // w = ω ⊗ γ
    R trE_closed, trEw_closed, trE2_closed, trE2w_closed;
    // tr(E_Φ²) with unit weights on the field-strength and Higgs-gradient terms.
    R trE2_unit_weights;

    std::vector<NamedCheck<C>> checks() const {
        return {
            {"twisted trace E", trE, C(trE_closed)},
            {"twisted trace E chiral", trEw, C(trEw_closed)},
            {"twisted trace E^2", trE2, C(trE2_closed)},
            {"twisted trace E^2 chiral", trE2w, C(trE2w_closed)},
        };
    }
};

template <RealScalar R>
CMatrix<R> twist_potential_matrix(const TorsionJet<R>& j, const TwistData<R>& t) {
    if (j.n != 4) throw UnsupportedDimension(j.n);
    validate(t);
    using C = Gaussian<R>;
    const auto& e = gammas<R>();
    CMatrix<R> idH = CMatrix<R>::identity(t.m);
    Spinor<R> w = volume_element<R>();

    CMatrix<R> out = kron(potential_E(j).E, idH);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (a != b) out += kron(Spinor<R>(e[a] * e[b]), t.Omega[a][b]) * C(ratio<R>(1, 2));
    for (int a = 0; a < 4; ++a) out += kron(Spinor<R>(w * e[a]), t.gradPhi[a]);
    out -= kron(spinor_identity<R>(), CMatrix<R>(t.Phi * t.Phi));
    out -= kron(Spinor<R>(act_form(j.V) * w), t.Phi) * C(R(3));
    return out;
}

template <RealScalar R>
CMatrix<R> chiral_weight(const TwistData<R>& t) {
    return kron(volume_element<R>(), t.gamma());
}

template <RealScalar R>
TwistTraces<R> twist_potential(const TorsionJet<R>& j, const TwistData<R>& t) {
    auto q = [](long p, long d) { return ratio<R>(p, d); };
    TwistTraces<R> r;
    r.E_phi = twist_potential_matrix(j, t);
    CMatrix<R> W = chiral_weight(t);
    CMatrix<R> E2 = r.E_phi * r.E_phi;
    r.trE = trace(r.E_phi);
    r.trEw = trace(CMatrix<R>(r.E_phi * W));
    r.trE2 = trace(E2);
    r.trE2w = trace(CMatrix<R>(E2 * W));

    TraceSuite<R> s = trace_suite(j);
    R m(t.m), trg(t.gamma_trace());
    CMatrix<R> g = t.gamma(), phi2 = t.Phi * t.Phi;
    R trPhi2 = trace(phi2).re;
    R trPhi4 = trace(CMatrix<R>(phi2 * phi2)).re;
    R trPhi2g = trace(CMatrix<R>(phi2 * g)).re;
    R trG2 = RealTraits<R>::zero();
    for (const auto& G : t.gradPhi) trG2 += trace(CMatrix<R>(G * G)).re;
    R trOm2 = field_square_trace(t.Omega).re;
    R dualOm = dual_field_trace(t.Omega, g).re;
    R dV = twist_dV_phi2(j, t);

    r.trE_closed = R(s.trE_closed * m - q(4, 1) * trPhi2);
    r.trEw_closed = R(s.trEw_closed * trg);
    R common = R(s.trE2_closed * m + q(4, 1) * trPhi4 - q(2, 1) * s.trE_closed * trPhi2 +
                 q(36, 1) * norm2(j.V) * trPhi2 + q(12, 1) * dV);
    r.trE2_closed = R(common - q(2, 1) * trOm2 + q(4, 1) * trG2);
    r.trE2_unit_weights = R(common + trOm2 + trG2);
    r.trE2w_closed = R(s.trE2w_closed * trg + dualOm - q(2, 1) * s.trEw_closed * trPhi2g);
    return r;
}

// ---------------------------------------------------------------------------
// Heat coefficient reports. Values are coefficients of π^pi_power; densities
// carry pi_power = -2 throughout.

template <RealScalar R>
struct SeeleyTerm {
    std::string name;
    int order;  // 0, 2 or 4
    R value;
};

template <RealScalar R>
struct SeeleyReport {
    std::string operator_name;
    std::string method;  // "closed-form" or "generic-Gilkey"
    bool integrated = false;
    int pi_power = -2;
    R a0 = RealTraits<R>::zero();
    R a2 = RealTraits<R>::zero();
    R a4 = RealTraits<R>::zero();
    std::vector<SeeleyTerm<R>> terms;

    void add(int order, std::string name, R value) {
        coefficient(order) += value;
        terms.push_back({std::move(name), order, std::move(value)});
    }

    R& coefficient(int order) {
        switch (order) {
            case 0: return a0;
            case 2: return a2;
            case 4: return a4;
        }
        throw PreconditionError("heat coefficient order must be 0, 2 or 4");
    }
    const R& coefficient(int order) const { return const_cast<SeeleyReport*>(this)->coefficient(order); }

    std::optional<R> term(std::string_view name, int order) const {
        for (const auto& t : terms)
            if (t.name == name && t.order == order) return t.value;
        return std::nullopt;
    }

    bool breakdown_consistent(Tolerance tol = {}) const {
        for (int order : {0, 2, 4}) {
            R sum = RealTraits<R>::zero();
            for (const auto& t : terms)
                if (t.order == order) sum += t.value;
            if (!RealTraits<R>::near(sum, coefficient(order), tol)) return false;
        }
        return true;
    }

    double numeric(int order) const {
        return RealTraits<R>::to_double(coefficient(order)) * std::pow(std::numbers::pi, pi_power);
    }
};

// Multiplies a density report by a volume c·π^k.
template <RealScalar R>
SeeleyReport<R> integrate_constant(SeeleyReport<R> r, const R& volume_coefficient, int volume_pi_power) {
    if (r.integrated) throw PreconditionError("report is already integrated");
    r.integrated = true;
    r.pi_power += volume_pi_power;
    r.a0 *= volume_coefficient;
    r.a2 *= volume_coefficient;
    r.a4 *= volume_coefficient;
    for (auto& t : r.terms) t.value *= volume_coefficient;
    return r;
}

namespace detail {

template <RealScalar R>
R real_trace(const Gaussian<R>& z, const char* what) {
    if constexpr (RealTraits<R>::exact)
        if (!z.is_real()) throw InvariantViolation(what, "trace has a nonzero imaginary part");
    return z.re;
}

}  // namespace detail

// Gilkey's local heat invariants (4π)^{-2}(α0, α2, α4) for a Laplace type operator
// with potential E and bundle curvature Ω, traced against `weight` (identity when
// null). lap_trace is tr(weight ΔE).
template <RealScalar R>
SeeleyReport<R> gilkey_densities(const CMatrix<R>& E, const std::array<std::array<CMatrix<R>, 4>, 4>& Omega,
                                 int fiber_dim, const TorsionJet<R>& j, const CMatrix<R>* weight = nullptr,
                                 const R& lap_trace = RealTraits<R>::zero(), std::string operator_name = "generic") {
    if (j.n != 4) throw UnsupportedDimension(j.n);
    if (E.rows() != fiber_dim || E.cols() != fiber_dim) throw ShapeError("gilkey: E does not act on the fiber");
    for (const auto& row : Omega)
        for (const auto& w : row)
            if (w.rows() != fiber_dim || w.cols() != fiber_dim) throw ShapeError("gilkey: curvature does not act on the fiber");
    if (weight && (weight->rows() != fiber_dim || weight->cols() != fiber_dim))
        throw ShapeError("gilkey: weight does not act on the fiber");

    auto q = [](long p, long d) { return ratio<R>(p, d); };
    auto tr = [&](const CMatrix<R>& x, const char* what) {
        return detail::real_trace(weight ? trace(CMatrix<R>(*weight * x)) : trace(x), what);
    };
    R trP = weight ? detail::real_trace(trace(*weight), "weight trace") : R(fiber_dim);
    R trE = tr(E, "tr E");
    R trE2 = tr(CMatrix<R>(E * E), "tr E^2");
    R trOm = RealTraits<R>::zero();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) trOm += tr(CMatrix<R>(Omega[a][b] * Omega[a][b]), "tr Omega^2");

    R Rg = j.R_g;
    R unit = q(1, 16);
    R per = R(unit * q(1, 360));

    SeeleyReport<R> r;
    r.operator_name = std::move(operator_name);
    r.method = "generic-Gilkey";
    r.add(0, "fiber_trace", R(unit * trP));
    r.add(2, "potential", R(unit * trE));
    r.add(2, "scalar_curvature", R(unit * q(1, 6) * Rg * trP));
    r.add(4, "potential_laplacian", R(per * q(60, 1) * lap_trace));
    r.add(4, "potential_curvature", R(per * q(60, 1) * Rg * trE));
    r.add(4, "potential_square", R(per * q(180, 1) * trE2));
    r.add(4, "bundle_curvature", R(per * q(30, 1) * trOm));
    r.add(4, "metric_invariants", R(per * trP *
                                    (q(12, 1) * j.lapRg + q(5, 1) * Rg * Rg - q(2, 1) * norm2(j.ric_g) +
                                     q(2, 1) * norm2(j.riem_g))));
    return r;
}

// ---------------------------------------------------------------------------
// Closed forms in jet quantities.

template <RealScalar R>
struct HolstTerm {
    Tensor<R> form;  // 18(dT - <T,*V♭> vol)
    R density;       // <form, vol> / 24
};

template <RealScalar R>
HolstTerm<R> holst_term(const TorsionJet<R>& j) {
    Tensor<R> f = modified_holst_form(j);
    R d = R(tensor_inner(f, volume_form<R>(4)) * ratio<R>(1, 24));
    return {std::move(f), std::move(d)};
}

template <RealScalar R>
struct GeometricInvariants {
    R Rtilde, holst, gauss_bonnet, weyl_sq, kinetic, pontryagin, axial_exchange;
};

template <RealScalar R>
GeometricInvariants<R> geometric_invariants(const TorsionJet<R>& j) {
    if (j.n != 4) throw UnsupportedDimension(j.n);
    GeometricInvariants<R> g;
    g.Rtilde = modified_scalar_curvature(j);
    g.holst = holst_term(j).density;
    g.gauss_bonnet = R(j.R_g * j.R_g - ratio<R>(4, 1) * norm2(j.ric_g) + norm2(j.riem_g));
    g.weyl_sq = norm2(weyl(j.riem_g));
    g.kinetic = R(norm2(j.deltaT) + norm2(j.dVflat));
    g.pontryagin = tensor_inner(j.riem_g, hodge_pair(j.riem_g));
    g.axial_exchange = tensor_inner(d_star_torsion(j), j.dVflat);
    return g;
}

// Closed-form densities for D*D.
template <RealScalar R>
SeeleyReport<R> dstar_d_coeffs(const TorsionJet<R>& j) {
    auto q = [](long p, long d) { return ratio<R>(p, d); };
    auto g = geometric_invariants(j);
    SeeleyReport<R> r;
    r.operator_name = "D*D";
    r.method = "closed-form";
    r.add(0, "volume", q(1, 4));
    r.add(2, "scalar_curvature", R(q(-1, 48) * g.Rtilde));
    r.add(4, "euler", R(q(11, 5760) * g.gauss_bonnet));
    r.add(4, "weyl", R(q(-1, 320) * g.weyl_sq));
    r.add(4, "torsion_kinetic", R(q(-3, 32) * g.kinetic));
    return r;
}

namespace detail {

// Chirality-even part scaled by `rank`, chirality-odd part scaled by `chiral_trace`.
template <RealScalar R>
void add_chiral_geometry(SeeleyReport<R>& r, const GeometricInvariants<R>& g, const R& rank, const R& chiral_trace) {
    auto q = [](long p, long d) { return ratio<R>(p, d); };
    r.add(0, "volume", R(q(1, 8) * rank));
    r.add(2, "scalar_curvature", R(q(-1, 96) * rank * g.Rtilde));
    r.add(2, "holst", R(q(-1, 96) * chiral_trace * g.holst));
    r.add(4, "euler", R(q(11, 11520) * rank * g.gauss_bonnet));
    r.add(4, "weyl", R(q(-1, 640) * rank * g.weyl_sq));
    r.add(4, "torsion_kinetic", R(q(-3, 64) * rank * g.kinetic));
    r.add(4, "pontryagin", R(q(1, 1536) * chiral_trace * g.pontryagin));
    r.add(4, "scalar_holst", R(q(1, 1152) * chiral_trace * g.Rtilde * g.holst));
    // The spinor trace pairs the curvature's last slots with ε, while the
    // topological density pairs the form slots; the difference integrates to this.
    r.add(4, "pontryagin_slot_correction",
          R(chiral_trace * (q(-1, 1152) * g.Rtilde * g.holst + q(3, 32) * g.axial_exchange)));
}

}  // namespace detail

// Closed-form densities for P⁺D*D, P⁺ = (1 + ω)/2.
template <RealScalar R>
SeeleyReport<R> chiral_coeffs(const TorsionJet<R>& j) {
    SeeleyReport<R> r;
    r.operator_name = "P+D*D";
    r.method = "closed-form";
    detail::add_chiral_geometry(r, geometric_invariants(j), RealTraits<R>::one(), RealTraits<R>::one());
    return r;
}

// Closed-form densities for the chiral twisted operator P D_Φ* D_Φ.
template <RealScalar R>
SeeleyReport<R> hplus_coeffs(const TorsionJet<R>& j, const TwistData<R>& t) {
    validate(t);
    auto q = [](long p, long d) { return ratio<R>(p, d); };
    auto g = geometric_invariants(j);
    CMatrix<R> gam = t.gamma(), phi2 = t.Phi * t.Phi;
    R trPhi2 = trace(phi2).re;
    R trPhi4 = trace(CMatrix<R>(phi2 * phi2)).re;
    R trPhi2g = trace(CMatrix<R>(phi2 * gam)).re;
    R trG2 = RealTraits<R>::zero();
    for (const auto& G : t.gradPhi) trG2 += trace(CMatrix<R>(G * G)).re;

    SeeleyReport<R> r;
    r.operator_name = "H+";
    r.method = "closed-form";
    detail::add_chiral_geometry(r, g, R(t.m), R(t.gamma_trace()));
    r.add(2, "higgs_mass", R(q(-1, 8) * trPhi2));
    r.add(4, "higgs_kinetic", R(q(1, 16) * trG2));
    r.add(4, "higgs_quartic", R(q(1, 16) * trPhi4));
    r.add(4, "higgs_curvature", R(q(1, 96) * (j.R_g - q(9, 1) * norm2(j.T)) * trPhi2));
    r.add(4, "higgs_holst", R(q(1, 96) * trPhi2g * g.holst));
    r.add(4, "yang_mills", R(q(-1, 48) * field_square_trace(t.Omega).re));
    r.add(4, "chiral_yang_mills", R(q(1, 64) * dual_field_trace(t.Omega, gam).re));
    return r;
}

// ---------------------------------------------------------------------------
// Generic Gilkey evaluation of the same operators.

template <RealScalar R>
SpinorCurvature<R> modified_spinor_curvature(const TorsionJet<R>& j) {
    return spinor_curvature(curvature_pack(modified_jet(j)).riem);
}

template <RealScalar R>
SeeleyReport<R> dstar_d_generic(const TorsionJet<R>& j, const R& lap_trace = RealTraits<R>::zero()) {
    return gilkey_densities(potential_E(j).E, modified_spinor_curvature(j), 4, j, static_cast<const CMatrix<R>*>(nullptr), lap_trace, "D*D");
}

template <RealScalar R>
SeeleyReport<R> chiral_generic(const TorsionJet<R>& j, const R& lap_trace = RealTraits<R>::zero()) {
    Spinor<R> p = chiral_projector<R>(+1);
    return gilkey_densities(potential_E(j).E, modified_spinor_curvature(j), 4, j, &p, lap_trace, "P+D*D");
}

template <RealScalar R>
SeeleyReport<R> hplus_generic(const TorsionJet<R>& j, const TwistData<R>& t,
                              const R& lap_trace = RealTraits<R>::zero()) {
    CMatrix<R> E = twist_potential_matrix(j, t);
    auto spin = modified_spinor_curvature(j);
    CMatrix<R> idH = CMatrix<R>::identity(t.m);
    Spinor<R> idS = spinor_identity<R>();
    std::array<std::array<CMatrix<R>, 4>, 4> om;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) om[a][b] = kron(spin[a][b], idH) + kron(idS, t.Omega[a][b]);
    int dim = 4 * t.m;
    CMatrix<R> p = (CMatrix<R>::identity(dim) + chiral_weight(t)) * Gaussian<R>(ratio<R>(1, 2));
    return gilkey_densities(E, om, dim, j, &p, lap_trace, "H+");
}

// ---------------------------------------------------------------------------

// -rk(H) / tr(γ); undefined for a chirally symmetric fiber.
template <RealScalar R>
R barbero_immirzi(const TwistData<R>& t) {
    int tg = t.gamma_trace();
    if (tg == 0) throw ChiralSymmetricError();
    return ratio<R>(-t.m, tg);
}

struct CutoffMoments {
    double F4 = 1, F2 = 1, F0 = 1;
    double Lambda = 1;

    void validate() const {
        for (double x : {F4, F2, F0, Lambda})
            if (!std::isfinite(x)) throw PreconditionError("cutoff moments must be finite");
        if (F4 < 0 || F2 < 0 || F0 < 0) throw PreconditionError("cutoff moments must be non-negative");
        if (Lambda <= 0) throw PreconditionError("cutoff scale must be positive");
    }
};

// Λ⁴F4 a0 + Λ²F2 a2 + F0 a4 for an integrated report.
template <RealScalar R>
double cc_action(const SeeleyReport<R>& r, const CutoffMoments& mom) {
    mom.validate();
    if (!r.integrated) throw PreconditionError("cc_action needs integrated heat coefficients");
    double l2 = mom.Lambda * mom.Lambda;
    return l2 * l2 * mom.F4 * r.numeric(0) + l2 * mom.F2 * r.numeric(2) + mom.F0 * r.numeric(4);
}

}  // namespace spectral_torsion
