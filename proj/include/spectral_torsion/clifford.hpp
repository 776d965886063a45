#pragma once

#include <array>
#include <bit>
#include <string_view>
#include <vector>

#include "matrix.hpp"
#include "torsion_geometry.hpp"

// Cl(4) acting on the rank-4 spinor fiber, in two models: explicit 4x4
// matrices over Gaussian scalars, and the abstract 16-dimensional algebra
// of blades e_A, A ⊆ {1,2,3,4}. Generators satisfy e_i e_j + e_j e_i = -2δ_ij.
namespace spectral_torsion {

template <RealScalar R>
using Spinor = CMatrix<R>;

// Chiral-type basis:
//   e_k = [[0, σ_k], [-σ_k, 0]]  (k = 1,2,3),   e_4 = [[0, i], [i, 0]],
// so that e_1e_2e_3e_4 = diag(1, 1, -1, -1).
template <RealScalar R>
std::array<Spinor<R>, 4> gamma_basis() {
    using C = Gaussian<R>;
    const C one(1), i = C::i();
    std::array<Matrix<C>, 3> sigma = {Matrix<C>(2, 2), Matrix<C>(2, 2), Matrix<C>(2, 2)};
    sigma[0](0, 1) = one;
    sigma[0](1, 0) = one;
    sigma[1](0, 1) = -i;
    sigma[1](1, 0) = i;
    sigma[2](0, 0) = one;
    sigma[2](1, 1) = -one;

    std::array<Spinor<R>, 4> e;
    for (int k = 0; k < 3; ++k) {
        Spinor<R> m(4, 4);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                m(r, c + 2) = sigma[k](r, c);
                m(r + 2, c) = -sigma[k](r, c);
            }
        e[k] = m;
    }
    Spinor<R> e4(4, 4);
    for (int r = 0; r < 2; ++r) {
        e4(r, r + 2) = i;
        e4(r + 2, r) = i;
    }
    e[3] = e4;
    return e;
}

template <RealScalar R>
const std::array<Spinor<R>, 4>& gammas() {
    static const std::array<Spinor<R>, 4> g = gamma_basis<R>();
    return g;
}

template <RealScalar R>
Spinor<R> spinor_identity() {
    return Spinor<R>::identity(4);
}

// Volume element e_1e_2e_3e_4.
template <RealScalar R>
Spinor<R> volume_element() {
    const auto& e = gammas<R>();
    return e[0] * e[1] * e[2] * e[3];
}

template <RealScalar R>
Spinor<R> chiral_projector(int sign) {
    Spinor<R> w = volume_element<R>();
    if (sign < 0) w = -w;
    return (spinor_identity<R>() + w) * Gaussian<R>(RealTraits<R>::ratio(1, 2));
}

// α acting by Clifford multiplication: (1/k!) Σ α_{i1..ik} e_{i1}⋯e_{ik},
// summed over all index tuples.
template <RealScalar R>
Spinor<R> act_form(const Tensor<R>& alpha) {
    if (alpha.dim() != 4) throw UnsupportedDimension(alpha.dim());
    int k = alpha.rank();
    if (k > 4) throw PreconditionError("act_form: degree exceeds 4");
    if (!is_alternating(alpha)) throw PreconditionError("act_form: form is not alternating");
    const auto& e = gammas<R>();
    Spinor<R> out(4, 4);
    for (std::size_t f = 0; f < alpha.size(); ++f) {
        const R& a = alpha[f];
        if (RealTraits<R>::is_zero(a)) continue;
        MultiIndex idx = alpha.index_of(f);
        Spinor<R> prod = spinor_identity<R>();
        for (int s = 0; s < k; ++s) prod = prod * e[idx[s]];
        out += prod * Gaussian<R>(a);
    }
    return out * Gaussian<R>(R(RealTraits<R>::one() / R(detail::factorial(k))));
}

// Abstract Clifford algebra element: coefficient per blade, blade bit s <-> e_{s+1}.
template <RealScalar R>
struct Multivector {
    using C = Gaussian<R>;
    std::array<C, 16> coeff{};

    static Multivector scalar(const C& c) {
        Multivector m;
        m.coeff[0] = c;
        return m;
    }
    static Multivector blade(unsigned mask, const C& c = C(1)) {
        Multivector m;
        m.coeff[mask & 15U] = c;
        return m;
    }

    const C& scalar_part() const { return coeff[0]; }

    Multivector& operator+=(const Multivector& o) {
        for (int a = 0; a < 16; ++a) coeff[a] += o.coeff[a];
        return *this;
    }
    Multivector& operator-=(const Multivector& o) {
        for (int a = 0; a < 16; ++a) coeff[a] -= o.coeff[a];
        return *this;
    }
    Multivector& operator*=(const C& s) {
        for (auto& c : coeff) c *= s;
        return *this;
    }
    friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
    friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
    friend Multivector operator*(Multivector a, const C& s) { return a *= s; }
    friend Multivector operator-(Multivector a) { return a *= C(-1); }
    friend bool operator==(const Multivector& a, const Multivector& b) { return a.coeff == b.coeff; }

    // e_A e_B = (-1)^{inversions + |A∩B|} e_{A xor B}.
    static int blade_sign(unsigned a, unsigned b) {
        int swaps = 0;
        for (unsigned bit = 0; bit < 4; ++bit)
            if (b & (1U << bit)) swaps += std::popcount(a >> (bit + 1));
        swaps += std::popcount(a & b);
        return swaps % 2 ? -1 : 1;
    }

    friend Multivector operator*(const Multivector& x, const Multivector& y) {
        Multivector out;
        for (unsigned a = 0; a < 16; ++a) {
            if (x.coeff[a].is_zero()) continue;
            for (unsigned b = 0; b < 16; ++b) {
                if (y.coeff[b].is_zero()) continue;
                C term = x.coeff[a] * y.coeff[b];
                if (blade_sign(a, b) < 0) term = -term;
                out.coeff[a ^ b] += term;
            }
        }
        return out;
    }
};

// The algebra homomorphism onto the matrix model.
template <RealScalar R>
Spinor<R> to_matrix(const Multivector<R>& m) {
    const auto& e = gammas<R>();
    Spinor<R> out(4, 4);
    for (unsigned a = 0; a < 16; ++a) {
        if (m.coeff[a].is_zero()) continue;
        Spinor<R> prod = spinor_identity<R>();
        for (int s = 0; s < 4; ++s)
            if (a & (1U << s)) prod = prod * e[s];
        out += prod * m.coeff[a];
    }
    return out;
}

// Blade expansion: one term per increasing index tuple.
template <RealScalar R>
Multivector<R> act_form_multivector(const Tensor<R>& alpha) {
    if (alpha.dim() != 4) throw UnsupportedDimension(alpha.dim());
    if (alpha.rank() > 4) throw PreconditionError("act_form: degree exceeds 4");
    if (!is_alternating(alpha)) throw PreconditionError("act_form: form is not alternating");
    Multivector<R> out;
    int k = alpha.rank();
    for (unsigned a = 0; a < 16; ++a) {
        if (std::popcount(a) != k) continue;
        MultiIndex idx{};
        int s = 0;
        for (int bit = 0; bit < 4; ++bit)
            if (a & (1U << bit)) idx[s++] = bit;
        out.coeff[a] = Gaussian<R>(alpha.at(idx));
    }
    return out;
}

// Coefficients of the Lichnerowicz potential. Defaults give
//   E = (-R/4 + 3/4|T|² - 3/2 div V + 9/2|V|²) id - 3/2 dT - 9 T·V - 9 (V⌟T).
// Verification runs can perturb one of them to confirm the trace checks notice.
template <RealScalar R>
struct PotentialCoefficients {
    R scalar_curv = RealTraits<R>::ratio(-1, 4);
    R torsion_sq = RealTraits<R>::ratio(3, 4);
    R div_v = RealTraits<R>::ratio(-3, 2);
    R vector_sq = RealTraits<R>::ratio(9, 2);
    R dt = RealTraits<R>::ratio(-3, 2);
    R t_dot_v = RealTraits<R>::ratio(-9, 1);
    R v_into_t = RealTraits<R>::ratio(-9, 1);
};

template <RealScalar R>
R potential_scalar(const TorsionJet<R>& j, const PotentialCoefficients<R>& c = {}) {
    return R(c.scalar_curv * j.R_g + c.torsion_sq * norm2(j.T) + c.div_v * j.divV + c.vector_sq * norm2(j.V));
}

template <RealScalar R>
struct SpinPotential {
    Spinor<R> E;
    R scalar_part;  // coefficient of the identity
};

template <RealScalar R>
SpinPotential<R> potential_E(const TorsionJet<R>& j, const PotentialCoefficients<R>& c = {}) {
    if (j.n != 4) throw UnsupportedDimension(j.n);
    using C = Gaussian<R>;
    R s = potential_scalar(j, c);
    Spinor<R> E = spinor_identity<R>() * C(s);
    E += act_form(j.dT) * C(c.dt);
    E += act_form(j.T) * act_form(j.V) * C(c.t_dot_v);
    E += act_form(interior(j.V, j.T)) * C(c.v_into_t);
    return {E, s};
}

template <RealScalar R>
Multivector<R> potential_E_multivector(const TorsionJet<R>& j, const PotentialCoefficients<R>& c = {}) {
    if (j.n != 4) throw UnsupportedDimension(j.n);
    using C = Gaussian<R>;
    Multivector<R> E = Multivector<R>::scalar(C(potential_scalar(j, c)));
    E += act_form_multivector(j.dT) * C(c.dt);
    E += act_form_multivector(j.T) * act_form_multivector(j.V) * C(c.t_dot_v);
    E += act_form_multivector(interior(j.V, j.T)) * C(c.v_into_t);
    return E;
}

template <Scalar S>
struct NamedCheck {
    std::string_view name;
    S lhs;
    S rhs;
    bool holds(Tolerance tol = {}) const {
        if constexpr (ScalarTraits<S>::exact)
            return lhs == rhs;
        else
            return ScalarTraits<S>::near(lhs, rhs, tol);
    }
};

// Spinor traces of E, E², Eω, E²ω computed directly, against the closed forms
// in jet quantities and their rewrites through R, R̃ and the Holst form.
template <RealScalar R>
struct TraceSuite {
    using C = Gaussian<R>;
    C trE, trE2, trEw, trE2w;
    R trE_closed, trE2_closed, trEw_closed, trE2w_closed;
    R trE_rewritten, trE2_rewritten, trEw_rewritten, trE2w_rewritten;

    std::vector<NamedCheck<C>> checks() const {
        return {
            {"trace E", trE, C(trE_closed)},
            {"trace E^2", trE2, C(trE2_closed)},
            {"trace E vol", trEw, C(trEw_closed)},
            {"trace E^2 vol", trE2w, C(trE2w_closed)},
            {"trace E (curvature form)", trE, C(trE_rewritten)},
            {"trace E^2 (curvature form)", trE2, C(trE2_rewritten)},
            {"trace E vol (Holst form)", trEw, C(trEw_rewritten)},
            {"trace E^2 vol (Holst form)", trE2w, C(trE2w_rewritten)},
        };
    }
};

template <RealScalar R>
TraceSuite<R> trace_suite(const TorsionJet<R>& j, const PotentialCoefficients<R>& c = {}) {
    if (j.n != 4) throw UnsupportedDimension(j.n);
    auto q = [](long p, long d) { return RealTraits<R>::ratio(p, d); };
    Spinor<R> E = potential_E(j, c).E;
    Spinor<R> w = volume_element<R>();
    Spinor<R> E2 = E * E;

    TraceSuite<R> t;
    t.trE = trace(E);
    t.trE2 = trace(E2);
    t.trEw = trace(Spinor<R>(E * w));
    t.trE2w = trace(Spinor<R>(E2 * w));

    // Closed forms use the unperturbed coefficients.
    R s = potential_scalar(j);
    R t2 = norm2(j.T), v2 = norm2(j.V);
    R dT_w = tensor_inner(j.dT, volume_form<R>(4));
    R axial = torsion_axial_pairing(j);
    R tail = R(q(3, 8) * norm2(j.dT) - q(162, 1) * norm2(interior(j.V, j.T)) + q(54, 1) * v2 * t2 -
               q(18, 1) * tensor_inner(interior(j.V, j.dT), j.T));
    t.trE_closed = R(-j.R_g + q(3, 1) * t2 - q(6, 1) * j.divV + q(18, 1) * v2);
    t.trE2_closed = R(q(4, 1) * s * s + tail);
    t.trEw_closed = R(q(-1, 4) * dT_w + q(6, 1) * axial);
    t.trE2w_closed = R(-s * (q(1, 2) * dT_w - q(12, 1) * axial));

    R Rt = modified_scalar_curvature(j);
    R holst_w = tensor_inner(modified_holst_form(j), volume_form<R>(4));
    R mix = R(q(2, 1) * j.R_g + Rt);
    t.trE_rewritten = R(q(-2, 3) * j.R_g - q(1, 3) * Rt);
    t.trE2_rewritten = R(q(1, 36) * mix * mix + tail);
    t.trEw_rewritten = R(q(-1, 72) * holst_w);
    t.trE2w_rewritten = R(q(1, 432) * mix * holst_w);
    return t;
}

// Spinor curvature of a curvature-like Q: Ω_ij = (1/4) Σ_kl Q_ijkl e_k e_l.
template <RealScalar R>
using SpinorCurvature = std::array<std::array<Spinor<R>, 4>, 4>;

template <RealScalar R>
SpinorCurvature<R> spinor_curvature(const Tensor<R>& q) {
    if (q.rank() != 4) throw ShapeError("spinor_curvature: rank 4 expected");
    if (q.dim() != 4) throw UnsupportedDimension(q.dim());
    const auto& e = gammas<R>();
    std::array<std::array<Spinor<R>, 4>, 4> ee;
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) ee[k][l] = e[k] * e[l];
    SpinorCurvature<R> om;
    Gaussian<R> quarter(RealTraits<R>::ratio(1, 4));
    for (int i = 0; i < 4; ++i)
        for (int jj = 0; jj < 4; ++jj) {
            Spinor<R> m(4, 4);
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    const R& x = q(i, jj, k, l);
                    if (!RealTraits<R>::is_zero(x)) m += ee[k][l] * Gaussian<R>(x);
                }
            om[i][jj] = m * quarter;
        }
    return om;
}

// Σ_ij tr(Ω_ij Ω_ij weight); weight = identity when omitted.
template <RealScalar R>
Gaussian<R> curvature_square_trace(const SpinorCurvature<R>& om, const Spinor<R>* weight = nullptr) {
    Gaussian<R> total(0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Spinor<R> sq = om[i][j] * om[i][j];
            total += weight ? trace(Spinor<R>(sq * *weight)) : trace(sq);
        }
    return total;
}

}  // namespace spectral_torsion
