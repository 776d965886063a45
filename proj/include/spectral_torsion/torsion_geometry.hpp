#pragma once

#include "curvature_algebra.hpp"

namespace spectral_torsion {

// Free pointwise data of an orthogonal connection with vectorial torsion V and
// totally antisymmetric torsion T. Derivative tensors carry the derivative slot first.
template <Scalar S>
struct JetFields {
    int n = 4;
    Tensor<S> V;       // rank 1
    Tensor<S> gradV;   // gradV(X,Y) = <∇_X V, Y>
    Tensor<S> T;       // alternating rank 3
    Tensor<S> gradT;   // (∇_X T)(Y,Z,W), alternating in the last three slots
    Tensor<S> riem_g;  // Levi-Civita curvature
    S lapRg = ScalarTraits<S>::zero();

    static JetFields zero(int n = 4) {
        return {n, Tensor<S>(n, 1), Tensor<S>(n, 2), Tensor<S>(n, 3), Tensor<S>(n, 4), Tensor<S>(n, 4),
                ScalarTraits<S>::zero()};
    }
};

template <Scalar S>
struct TorsionJet {
    int n = 4;
    Tensor<S> V, gradV, T, gradT, riem_g;
    S lapRg;

    Tensor<S> ric_g;
    S R_g;
    Tensor<S> dT;      // 4-form
    Tensor<S> deltaT;  // 2-form
    S divV;
    Tensor<S> dVflat;  // 2-form

    JetFields<S> fields() const { return {n, V, gradV, T, gradT, riem_g, lapRg}; }
};

namespace detail {

template <Scalar S>
void require_shape(const Tensor<S>& t, int n, int rank, const char* name) {
    if (t.dim() != n || t.rank() != rank)
        throw ShapeError(std::string("jet field ") + name + " must have dim " + std::to_string(n) + " and rank " +
                         std::to_string(rank));
}

}  // namespace detail

template <Scalar S>
TorsionJet<S> build_jet(const JetFields<S>& f) {
    int n = f.n;
    if (n < 3) throw ShapeError("jet dimension must be at least 3");
    detail::require_shape(f.V, n, 1, "V");
    detail::require_shape(f.gradV, n, 2, "gradV");
    detail::require_shape(f.T, n, 3, "T");
    detail::require_shape(f.gradT, n, 4, "gradT");
    detail::require_shape(f.riem_g, n, 4, "riem_g");

    if (!is_alternating(f.T)) throw InvariantViolation("T alternating", "torsion 3-form is not totally antisymmetric");
    if (!is_alternating(f.gradT, 1, 4))
        throw InvariantViolation("gradT alternating", "gradient of T is not alternating in its last three slots");
    if (!is_curvature_like(f.riem_g))
        throw InvariantViolation("riem_g pair antisymmetry", "curvature is not antisymmetric within each pair");
    if (!is_pair_symmetric(f.riem_g))
        throw InvariantViolation("riem_g pair symmetry", "curvature is not symmetric under pair exchange");
    // Floating jets converted from exact data carry rounding in the cyclic sum.
    if (!near(bianchi(f.riem_g), Tensor<S>(n, 4)))
        throw InvariantViolation("riem_g first Bianchi identity", "cyclic sum does not vanish");

    TorsionJet<S> j;
    j.n = n;
    j.V = f.V;
    j.gradV = f.gradV;
    j.T = f.T;
    j.gradT = f.gradT;
    j.riem_g = f.riem_g;
    j.lapRg = f.lapRg;
    j.ric_g = ricci_contraction(f.riem_g);
    j.R_g = trace2(j.ric_g);
    j.dT = exterior_derivative(f.gradT);
    j.deltaT = codifferential(f.gradT);
    j.divV = trace2(f.gradV);
    j.dVflat = exterior_derivative(f.gradV);
    return j;
}

template <RealScalar R>
JetFields<double> to_double(const JetFields<R>& f) {
    return {f.n, to_double(f.V), to_double(f.gradV), to_double(f.T), to_double(f.gradT), to_double(f.riem_g),
            to_double(f.lapRg)};
}

template <Scalar S>
TorsionJet<S> zero_jet(int n = 4) {
    return build_jet(JetFields<S>::zero(n));
}

// Jet of the connection with T -> 3T and V -> (n-1)V.
template <Scalar S>
TorsionJet<S> modified_jet(const TorsionJet<S>& j) {
    JetFields<S> f = j.fields();
    S three = ratio<S>(3, 1);
    S vscale = ratio<S>(j.n - 1, 1);
    f.T *= three;
    f.gradT *= three;
    f.V *= vscale;
    f.gradV *= vscale;
    return build_jet(f);
}

template <Scalar S>
struct QuadraticTensors {
    Tensor<S> gT;      // <X⌟T, Y⌟T>
    Tensor<S> gV;      // V♭ ⊗ V♭
    Tensor<S> gNV;     // gradV + gradV^t
    Tensor<S> dVflat;
};

template <Scalar S>
QuadraticTensors<S> quadratic_tensors(const TorsionJet<S>& j) {
    int n = j.n;
    QuadraticTensors<S> q{Tensor<S>(n, 2), tensor_product(j.V, j.V), j.gradV + transpose2(j.gradV), j.dVflat};
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) q.gT(a, b) += j.T(a, c, d) * j.T(b, c, d);
    return q;
}

template <Scalar S>
struct QuarticTensors {
    Tensor<S> GT;
    Tensor<S> KNT;
    Tensor<S> KVT;
};

template <Scalar S>
QuarticTensors<S> quartic_tensors(const TorsionJet<S>& j) {
    int n = j.n;
    QuarticTensors<S> q{Tensor<S>(n, 4), Tensor<S>(n, 4), Tensor<S>(n, 4)};
    const auto& T = j.T;
    const auto& dT = j.gradT;
    const auto& V = j.V;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    S g = ScalarTraits<S>::zero();
                    for (int e = 0; e < n; ++e) g += T(b, c, e) * T(a, d, e) - T(a, c, e) * T(b, d, e);
                    q.GT(a, b, c, d) = g;
                    q.KNT(a, b, c, d) = dT(a, b, c, d) - dT(b, a, c, d) - dT(c, a, b, d) + dT(d, a, b, c);
                    q.KVT(a, b, c, d) = V(a) * T(b, c, d) - V(b) * T(a, c, d) - V(c) * T(a, b, d) + V(d) * T(a, b, c);
                }
    return q;
}

template <Scalar S>
struct CurvaturePack {
    Tensor<S> riemS, riemA, riem;
    Tensor<S> riemS_ker, riemS_im;
    Tensor<S> ricS, ricA;
    S R;
    S Rtilde;
};

template <Scalar S>
S scalar_curvature(const TorsionJet<S>& j) {
    int n = j.n;
    return S(j.R_g + ratio<S>(2 * (n - 1), 1) * j.divV - ratio<S>((n - 1) * (n - 2), 1) * norm2(j.V) - norm2(j.T));
}

// Scalar curvature of the modified connection (T -> 3T, V -> (n-1)V).
template <Scalar S>
S modified_scalar_curvature(const TorsionJet<S>& j) {
    long m = j.n - 1;
    return S(j.R_g + ratio<S>(2 * m * m, 1) * j.divV - ratio<S>(m * m * m * (j.n - 2), 1) * norm2(j.V) -
             ratio<S>(9, 1) * norm2(j.T));
}

template <Scalar S>
CurvaturePack<S> curvature_pack(const TorsionJet<S>& j) {
    int n = j.n;
    Tensor<S> g = metric<S>(n);
    Tensor<S> gg = kn_product(g, g);
    auto quad = quadratic_tensors(j);
    auto quart = quartic_tensors(j);
    S v2 = norm2(j.V);
    S half = ratio<S>(1, 2);

    CurvaturePack<S> p;
    p.riemS = j.riem_g;
    p.riemS -= kn_product(quad.gNV, g) * half;
    p.riemS += gg * S(v2 * half);
    p.riemS -= kn_product(quad.gV, g);
    p.riemS += j.dT * half;
    if (n >= 4) p.riemS -= wedge(j.V, j.T);
    p.riemS -= quart.GT;

    Tensor<S> vT = interior(j.V, j.T);
    p.riemA = quart.KNT * half;
    p.riemA -= kn_product(j.dVflat, g) * half;
    p.riemA += kn_product(vT, g);
    p.riemA += quart.KVT;

    p.riem = p.riemS + p.riemA;
    p.riemS_im = bianchi(p.riemS);
    p.riemS_ker = p.riemS - p.riemS_im;

    S nm2 = ratio<S>(n - 2, 1);
    p.ricS = j.ric_g;
    p.ricS += g * S(j.divV - nm2 * v2);
    p.ricS += quad.gV * nm2;
    p.ricS += quad.gNV * ratio<S>(n - 2, 2);
    p.ricS -= quad.gT;

    p.ricA = -j.deltaT;
    p.ricA += j.dVflat * ratio<S>(n - 2, 2);
    p.ricA += vT * ratio<S>(4 - n, 1);

    p.R = scalar_curvature(j);
    p.Rtilde = modified_scalar_curvature(j);
    return p;
}

template <Scalar S>
struct NormIdentities {
    S riemS_ker_direct, riemS_ker_closed;
    S riemS_im_direct, riemS_im_closed;
    S riem_direct, riem_split;  // ||riem||² and ||riemS||² + ||riemA||²
    Tensor<S> weyl_ker;         // weyl(riemS_ker)
    Tensor<S> weyl_g;           // weyl(riem_g)
};

template <Scalar S>
NormIdentities<S> norm_identities(const TorsionJet<S>& j) {
    if (j.n != 4) throw UnsupportedDimension(j.n);
    auto p = curvature_pack(j);
    NormIdentities<S> r;
    r.weyl_ker = weyl(p.riemS_ker);
    r.weyl_g = weyl(j.riem_g);
    r.riemS_ker_direct = norm2(p.riemS_ker);
    r.riemS_ker_closed = norm2(r.weyl_g) + ratio<S>(2, 1) * norm2(p.ricS) - p.R * p.R * ratio<S>(1, 3);
    r.riemS_im_direct = norm2(p.riemS_im);
    Tensor<S> vT = interior(j.V, j.T);
    r.riemS_im_closed = norm2(j.dT) * ratio<S>(1, 4) + ratio<S>(4, 1) * norm2(j.V) * norm2(j.T) -
                        ratio<S>(12, 1) * norm2(vT) - ratio<S>(4, 1) * tensor_inner(interior(j.V, j.dT), j.T);
    r.riem_direct = norm2(p.riem);
    r.riem_split = norm2(p.riemS) + norm2(p.riemA);
    return r;
}

// <T, *V♭>
template <Scalar S>
S torsion_axial_pairing(const TorsionJet<S>& j) {
    return tensor_inner(j.T, hodge_star(j.V));
}

// Holst 4-form of the modified connection: 18(dT - <T,*V♭> vol).
template <Scalar S>
Tensor<S> modified_holst_form(const TorsionJet<S>& j) {
    if (j.n != 4) throw UnsupportedDimension(j.n);
    return (j.dT - volume_form<S>(4) * torsion_axial_pairing(j)) * ratio<S>(18, 1);
}

// d(*T) from the gradient of T: (d*T)_ab = ∂_a(*T)_b - ∂_b(*T)_a.
template <Scalar S>
Tensor<S> d_star_torsion(const TorsionJet<S>& j) {
    if (j.n != 4) throw UnsupportedDimension(j.n);
    Tensor<S> grad_star(4, 2);
    for (int a = 0; a < 4; ++a) {
        Tensor<S> slice(4, 3);
        for (std::size_t f = 0; f < 64; ++f) slice[f] = j.gradT[static_cast<std::size_t>(a) * 64 + f];
        Tensor<S> st = hodge_star(slice);
        for (int b = 0; b < 4; ++b) grad_star(a, b) = st(b);
    }
    return exterior_derivative(grad_star);
}

template <Scalar S>
struct PontryaginDensities {
    S full;                       // <riem, hodge_pair riem>, the pairing seen by spinor traces
    S chern_weil;                 // <riem, hodge_first_pair riem>, integrates to -16π² p1
    std::array<S, 4> summands;    // Weyl, Ricci-antisymmetric, scalar, mixed; they sum to `full`
    S scalar_summand_pointwise;   // pointwise rewrite of the scalar summand
    S ricA_lhs, ricA_rhs;         // integrands equal after integration
    // <riemA + ricA∧g/2, hodge_pair(hS∧g)> and its integral-equivalent form.
    // The mixed summand is the only pair-symmetric/antisymmetric cross term, so
    // full - chern_weil = 2 * summands[3]; topological invariance of the
    // Chern-Weil integral then fixes mixed_rhs = -(ricA_rhs + scalar rewrite).
    S mixed_lhs, mixed_rhs;
    // Same-sign variant, ricA_rhs + scalar rewrite; kept for comparison.
    S mixed_rhs_same_sign;
};

template <Scalar S>
PontryaginDensities<S> pontryagin_densities(const TorsionJet<S>& j) {
    if (j.n != 4) throw UnsupportedDimension(j.n);
    auto p = curvature_pack(j);
    Tensor<S> g = metric<S>(4);
    Tensor<S> omega = volume_form<S>(4);
    Tensor<S> C = weyl(p.riemS_ker);
    Tensor<S> ricA_g = kn_product(p.ricA, g);
    Tensor<S> hS = p.ricS - g * S(p.R * ratio<S>(1, 4));
    Tensor<S> mixed = p.riemA + ricA_g * ratio<S>(1, 2);

    PontryaginDensities<S> d;
    d.full = tensor_inner(p.riem, hodge_pair(p.riem));
    d.chern_weil = tensor_inner(p.riem, hodge_first_pair(p.riem));
    d.summands[0] = tensor_inner(C, hodge_pair(C));
    d.summands[1] = tensor_inner(ricA_g, hodge_pair(ricA_g)) * ratio<S>(1, 4);
    d.summands[2] = -p.R * ratio<S>(1, 12) * tensor_inner(p.riemS_im, hodge_pair(kn_product(g, g)));
    d.mixed_lhs = tensor_inner(mixed, hodge_pair(kn_product(hS, g)));
    d.summands[3] = -d.mixed_lhs;

    S dT_omega = tensor_inner(j.dT, omega);
    S axial = torsion_axial_pairing(j);
    d.scalar_summand_pointwise = -p.R * ratio<S>(1, 6) * dT_omega + p.R * ratio<S>(4, 3) * axial;

    S kinetic_mix = ratio<S>(8, 1) * tensor_inner(d_star_torsion(j), j.dVflat);
    d.ricA_lhs = d.summands[1];
    d.ricA_rhs = kinetic_mix;
    d.mixed_rhs = -(kinetic_mix + d.scalar_summand_pointwise);
    d.mixed_rhs_same_sign = kinetic_mix + d.scalar_summand_pointwise;
    return d;
}

template <Scalar S>
struct EulerIntegrands {
    S riem_sq;            // ||riem||²
    S riem_sq_rhs;        // closed form equal to ||riem||² after integration
    S gauss_bonnet_g;     // (R^g)² - 4||ric^g||² + ||riem^g||²
    S gauss_bonnet_torsion;  // R² - 4||ricS||² + 4||ricA||² + ||riemS||² - ||riemA||²
};

template <Scalar S>
EulerIntegrands<S> euler_integrands(const TorsionJet<S>& j) {
    if (j.n != 4) throw UnsupportedDimension(j.n);
    auto p = curvature_pack(j);
    EulerIntegrands<S> e;
    e.riem_sq = norm2(p.riem);
    S v2 = norm2(j.V);
    S t2 = norm2(j.T);
    e.riem_sq_rhs = p.R * p.R * ratio<S>(1, 3) - j.R_g * j.R_g * ratio<S>(2, 3) + ratio<S>(2, 1) * norm2(j.ric_g) +
                    norm2(weyl(j.riem_g)) + ratio<S>(4, 1) * norm2(j.deltaT) + ratio<S>(4, 1) * norm2(j.dVflat) +
                    norm2(j.dT) * ratio<S>(1, 2) + ratio<S>(8, 1) * v2 * t2 -
                    ratio<S>(24, 1) * norm2(interior(j.V, j.T)) -
                    ratio<S>(8, 1) * tensor_inner(interior(j.V, j.dT), j.T);
    e.gauss_bonnet_g = j.R_g * j.R_g - ratio<S>(4, 1) * norm2(j.ric_g) + norm2(j.riem_g);
    e.gauss_bonnet_torsion = p.R * p.R - ratio<S>(4, 1) * norm2(p.ricS) + ratio<S>(4, 1) * norm2(p.ricA) +
                             norm2(p.riemS) - norm2(p.riemA);
    return e;
}

}  // namespace spectral_torsion
