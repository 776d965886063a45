#pragma once

#include <array>
#include <string_view>

#include "tensor.hpp"

namespace spectral_torsion {

// (h ∧ k)_{abcd} = h_ac k_bd + h_bd k_ac - h_ad k_bc - h_bc k_ad.
// h and k need not be symmetric.
template <Scalar S>
Tensor<S> kn_product(const Tensor<S>& h, const Tensor<S>& k) {
    if (h.rank() != 2 || k.rank() != 2) throw ShapeError("kn_product: arguments must be bilinear forms");
    h.require_same_shape(k);
    int n = h.dim();
    Tensor<S> out(n, 4);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    out(a, b, c, d) = h(a, c) * k(b, d) + h(b, d) * k(a, c) - h(a, d) * k(b, c) - h(b, c) * k(a, d);
    return out;
}

// c(Q)_xy = sum_i Q(e_i, x, y, e_i)
template <Scalar S>
Tensor<S> ricci_contraction(const Tensor<S>& q) {
    if (q.rank() != 4) throw ShapeError("ricci_contraction: rank 4 expected");
    int n = q.dim();
    Tensor<S> out(n, 2);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int i = 0; i < n; ++i) out(x, y) += q(i, x, y, i);
    return out;
}

template <Scalar S>
S g_trace(const Tensor<S>& k) {
    return trace2(k);
}

// b(Q)_abcd = (Q_abcd + Q_bcad + Q_cabd) / 3
template <Scalar S>
Tensor<S> bianchi(const Tensor<S>& q) {
    if (q.rank() != 4) throw ShapeError("bianchi: rank 4 expected");
    int n = q.dim();
    Tensor<S> out(n, 4);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) out(a, b, c, d) = q(a, b, c, d) + q(b, c, a, d) + q(c, a, b, d);
    out *= ratio<S>(1, 3);
    return out;
}

// Q_{klij}: exchanges the two index pairs.
template <Scalar S>
Tensor<S> swap_pairs(const Tensor<S>& q) {
    return permute_slots(q, {2, 3, 0, 1});
}

// Epsilon contraction on the last index pair:
// hodge_pair(Q)_{ijlm} = sum_ab Q_{ijab} eps_{ablm}.
// With this normalization hodge_pair(g∧g) = 4 vol and hodge_pair² = 4 id;
// hodge_pair / 2 is the involutive isometry.
template <Scalar S>
Tensor<S> hodge_pair(const Tensor<S>& q) {
    if (q.rank() != 4) throw ShapeError("hodge_pair: rank 4 expected");
    if (q.dim() != 4) throw UnsupportedDimension(q.dim());
    Tensor<S> eps = volume_form<S>(4);
    Tensor<S> out(4, 4);
    for (std::size_t ij = 0; ij < 16; ++ij)
        for (std::size_t ab = 0; ab < 16; ++ab) {
            const S& x = q[ij * 16 + ab];
            if (ScalarTraits<S>::is_zero(x)) continue;
            for (std::size_t lm = 0; lm < 16; ++lm) {
                const S& e = eps[ab * 16 + lm];
                if (!ScalarTraits<S>::is_zero(e)) out[ij * 16 + lm] += x * e;
            }
        }
    return out;
}

// Epsilon contraction on the first index pair. For a curvature tensor whose first
// pair holds the 2-form slots this gives the Chern-Weil (Pontryagin) pairing.
template <Scalar S>
Tensor<S> hodge_first_pair(const Tensor<S>& q) {
    return swap_pairs(hodge_pair(swap_pairs(q)));
}

// The same epsilon contraction on a single 2-form: sum_ab k_ab eps_{ablm}.
// Equals twice the Hodge star of k.
template <Scalar S>
Tensor<S> pair_dual(const Tensor<S>& k) {
    if (k.rank() != 2) throw ShapeError("pair_dual: rank 2 expected");
    if (k.dim() != 4) throw UnsupportedDimension(k.dim());
    Tensor<S> eps = volume_form<S>(4);
    Tensor<S> out(4, 2);
    for (std::size_t ab = 0; ab < 16; ++ab)
        for (std::size_t lm = 0; lm < 16; ++lm) out[lm] += k[ab] * eps[ab * 16 + lm];
    return out;
}

template <Scalar S>
bool is_curvature_like(const Tensor<S>& q) {
    if (q.rank() != 4) return false;
    Tensor<S> neg = -q;
    return same_tensor(permute_slots(q, {1, 0, 2, 3}), neg) && same_tensor(permute_slots(q, {0, 1, 3, 2}), neg);
}

template <Scalar S>
bool is_pair_symmetric(const Tensor<S>& q) {
    return q.rank() == 4 && same_tensor(swap_pairs(q), q);
}

template <Scalar S>
bool is_pair_antisymmetric(const Tensor<S>& q) {
    return q.rank() == 4 && same_tensor(swap_pairs(q), Tensor<S>(-q));
}

template <Scalar S>
bool is_algebraic_curvature(const Tensor<S>& q) {
    return is_curvature_like(q) && is_pair_symmetric(q) && same_tensor(bianchi(q), Tensor<S>(q.dim(), 4));
}

enum class Component { S, HS, WS, L4, HA, WA };

inline constexpr std::array<Component, 6> kComponents = {Component::S,  Component::HS, Component::WS,
                                                         Component::L4, Component::HA, Component::WA};

inline std::string_view component_name(Component c) {
    switch (c) {
        case Component::S: return "S";
        case Component::HS: return "HS";
        case Component::WS: return "WS";
        case Component::L4: return "L4";
        case Component::HA: return "HA";
        case Component::WA: return "WA";
    }
    return "?";
}

// Dimensions of the six summands of Λ²⊗Λ² at n = 4.
inline int component_dimension(Component c) {
    constexpr std::array<int, 6> dims = {1, 9, 10, 1, 6, 9};
    return dims[static_cast<int>(c)];
}

template <Scalar S>
struct RicciDecomposition {
    S scalar;            // tr c(Q)
    Tensor<S> tracefree; // c(Q) - scalar/n g
    Tensor<S> weyl;
};

// Q = -s/(2n(n-1)) g∧g - 1/(n-2) h∧g + weyl
template <Scalar S>
RicciDecomposition<S> ricci_decompose(const Tensor<S>& q) {
    if (!is_algebraic_curvature(q)) {
        if (!is_curvature_like(q)) throw PreconditionError("ricci_decompose: not antisymmetric in both pairs");
        if (!is_pair_symmetric(q)) throw PreconditionError("ricci_decompose: pair symmetry fails");
        throw PreconditionError("ricci_decompose: first Bianchi identity fails");
    }
    int n = q.dim();
    Tensor<S> g = metric<S>(n);
    Tensor<S> ric = ricci_contraction(q);
    S s = trace2(ric);
    Tensor<S> h = ric - g * S(s * ratio<S>(1, n));
    Tensor<S> w = q;
    w += kn_product(g, g) * S(s * ratio<S>(1, 2 * n * (n - 1)));
    w += kn_product(h, g) * ratio<S>(1, n - 2);
    return {s, h, w};
}

template <Scalar S>
Tensor<S> weyl(const Tensor<S>& q) {
    return ricci_decompose(q).weyl;
}

template <Scalar S>
struct Decomposition6 {
    std::array<Tensor<S>, 6> parts;
    const Tensor<S>& operator[](Component c) const { return parts[static_cast<int>(c)]; }
    Tensor<S>& operator[](Component c) { return parts[static_cast<int>(c)]; }
};

// Orthogonal splitting of Λ²⊗Λ²: the pair-symmetric half splits into the Bianchi
// image (4-forms) and the Ricci decomposition of its kernel; the pair-antisymmetric
// half splits into k∧g (k antisymmetric) and its Ricci-free complement.
template <Scalar S>
Decomposition6<S> decompose6(const Tensor<S>& q) {
    if (q.rank() != 4) throw ShapeError("decompose6: rank 4 expected");
    if (q.dim() != 4) throw UnsupportedDimension(q.dim());
    if (!is_curvature_like(q)) throw InvariantViolation("curvature-like", "input is not antisymmetric in both pairs");
    int n = q.dim();
    Tensor<S> g = metric<S>(n);
    Tensor<S> swapped = swap_pairs(q);
    Tensor<S> sym = (q + swapped) * ratio<S>(1, 2);
    Tensor<S> anti = (q - swapped) * ratio<S>(1, 2);

    Decomposition6<S> d;
    d[Component::L4] = bianchi(sym);
    auto rd = ricci_decompose(Tensor<S>(sym - d[Component::L4]));
    d[Component::S] = kn_product(g, g) * S(-rd.scalar * ratio<S>(1, 2 * n * (n - 1)));
    d[Component::HS] = kn_product(rd.tracefree, g) * ratio<S>(-1, n - 2);
    d[Component::WS] = rd.weyl;
    d[Component::HA] = kn_product(ricci_contraction(anti), g) * ratio<S>(-1, n - 2);
    d[Component::WA] = anti - d[Component::HA];
    return d;
}

// For pair-antisymmetric Q returns q with hodge_pair(Q) = q∧g, q = -c(hodge_pair Q)/2.
template <Scalar S>
Tensor<S> trace_rep(const Tensor<S>& q) {
    if (!is_curvature_like(q) || !is_pair_antisymmetric(q))
        throw PreconditionError("trace_rep: input must be antisymmetric under pair exchange");
    return ricci_contraction(hodge_pair(q)) * ratio<S>(-1, 2);
}

}  // namespace spectral_torsion
