#pragma once

#include <cstdint>
#include <random>

#include "spectral_action.hpp"

namespace spectral_torsion {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream per (seed, trial) so results do not depend on scheduling.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    return splitmix64(seed ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
}

// mt19937_64 output is fixed by the standard; sampling is done by hand (not with
// std distributions) so generated data is identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<std::int64_t>(engine_() % span);
    }

    bool coin() { return engine_() & 1U; }

    template <Scalar S>
    S small_rational() {
        long num = static_cast<long>(uniform_int(-9, 9));
        long den = static_cast<long>(uniform_int(1, 4));
        return ratio<S>(num, den);
    }

private:
    std::mt19937_64 engine_;
};

template <Scalar S>
Tensor<S> random_tensor(Rng& rng, int n, int rank) {
    Tensor<S> t(n, rank);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.small_rational<S>();
    return t;
}

// Random alternating k-form: one free value per increasing index tuple.
template <Scalar S>
Tensor<S> random_form(Rng& rng, int n, int k) {
    Tensor<S> t(n, k);
    for (std::size_t f = 0; f < t.size(); ++f) {
        MultiIndex idx = t.index_of(f);
        if (!std::is_sorted(idx.begin(), idx.begin() + k) ||
            std::adjacent_find(idx.begin(), idx.begin() + k) != idx.begin() + k)
            continue;
        S v = rng.small_rational<S>();
        for (const auto& sp : detail::permutations(k)) {
            MultiIndex p{};
            for (int s = 0; s < k; ++s) p[s] = idx[sp.perm[s]];
            t.at(p) = sp.sign > 0 ? v : S(-v);
        }
    }
    return t;
}

template <Scalar S>
Tensor<S> random_symmetric2(Rng& rng, int n) {
    Tensor<S> t(n, 2);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) t(a, b) = t(b, a) = rng.small_rational<S>();
    return t;
}

// Random element of Λ²⊗Λ².
template <Scalar S>
Tensor<S> random_curvature_like(Rng& rng, int n) {
    Tensor<S> q(n, 4);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = c + 1; d < n; ++d) {
                    S v = rng.small_rational<S>();
                    q(a, b, c, d) = v;
                    q(b, a, d, c) = v;
                    q(b, a, c, d) = -v;
                    q(a, b, d, c) = -v;
                }
    return q;
}

template <Scalar S>
Tensor<S> random_pair_symmetric(Rng& rng, int n) {
    Tensor<S> q = random_curvature_like<S>(rng, n);
    return (q + swap_pairs(q)) * ratio<S>(1, 2);
}

template <Scalar S>
Tensor<S> random_algebraic_curvature(Rng& rng, int n) {
    Tensor<S> q = random_pair_symmetric<S>(rng, n);
    return q - bianchi(q);
}

template <Scalar S>
JetFields<S> random_jet_fields(Rng& rng, int n = 4) {
    JetFields<S> f;
    f.n = n;
    f.V = random_tensor<S>(rng, n, 1);
    f.gradV = random_tensor<S>(rng, n, 2);
    f.T = random_form<S>(rng, n, 3);
    f.gradT = Tensor<S>(n, 4);
    for (int a = 0; a < n; ++a) {
        Tensor<S> slice = random_form<S>(rng, n, 3);
        for (std::size_t i = 0; i < slice.size(); ++i) f.gradT[static_cast<std::size_t>(a) * slice.size() + i] = slice[i];
    }
    f.riem_g = random_algebraic_curvature<S>(rng, n);
    f.lapRg = rng.small_rational<S>();
    return f;
}

template <Scalar S>
TorsionJet<S> random_jet(Rng& rng, int n = 4) {
    return build_jet(random_jet_fields<S>(rng, n));
}

// Constant fields on flat space: gradients and curvature vanish.
template <Scalar S>
TorsionJet<S> random_constant_flat_jet(Rng& rng) {
    JetFields<S> f = JetFields<S>::zero(4);
    f.V = random_tensor<S>(rng, 4, 1);
    f.T = random_form<S>(rng, 4, 3);
    return build_jet(f);
}

template <RealScalar R>
Gaussian<R> random_gaussian(Rng& rng) {
    return {rng.small_rational<R>(), rng.small_rational<R>()};
}

template <RealScalar R>
CMatrix<R> random_hermitian(Rng& rng, int m, int sign = +1) {
    CMatrix<R> h(m, m);
    for (int a = 0; a < m; ++a) {
        h(a, a) = sign > 0 ? Gaussian<R>(rng.small_rational<R>()) : Gaussian<R>(R(0), rng.small_rational<R>());
        for (int b = a + 1; b < m; ++b) {
            h(a, b) = random_gaussian<R>(rng);
            h(b, a) = sign > 0 ? h(a, b).conj() : Gaussian<R>(-h(a, b).conj());
        }
    }
    return h;
}

// Zeroes the entries that couple opposite chiralities.
template <RealScalar R>
CMatrix<R> chirality_block(CMatrix<R> x, const std::vector<int>& gamma_diag) {
    for (int a = 0; a < x.rows(); ++a)
        for (int b = 0; b < x.cols(); ++b)
            if (gamma_diag[static_cast<std::size_t>(a)] != gamma_diag[static_cast<std::size_t>(b)]) x(a, b) = Gaussian<R>(0);
    return x;
}

template <RealScalar R>
std::vector<int> random_gamma(Rng& rng, int m) {
    std::vector<int> g(static_cast<std::size_t>(m));
    for (auto& s : g) s = rng.coin() ? 1 : -1;
    return g;
}

// Independent pointwise twist values.
template <RealScalar R>
TwistData<R> random_twist(Rng& rng, int m) {
    TwistData<R> t = TwistData<R>::trivial(m);
    t.gamma_diag = random_gamma<R>(rng, m);
    t.Phi = random_hermitian<R>(rng, m);
    for (auto& g : t.gradPhi) g = random_hermitian<R>(rng, m);
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            t.Omega[a][b] = chirality_block(random_hermitian<R>(rng, m, -1), t.gamma_diag);
            t.Omega[b][a] = -t.Omega[a][b];
        }
    return t;
}

// Twist from a constant connection A on flat space: G_i = [A_i, Φ], Ω_ij = [A_i, A_j].
template <RealScalar R>
TwistData<R> random_constant_twist(Rng& rng, int m) {
    TwistData<R> t = TwistData<R>::trivial(m);
    t.gamma_diag = random_gamma<R>(rng, m);
    t.Phi = random_hermitian<R>(rng, m);
    std::array<CMatrix<R>, 4> A;
    for (auto& a : A) a = chirality_block(random_hermitian<R>(rng, m, -1), t.gamma_diag);
    for (int a = 0; a < 4; ++a) {
        t.gradPhi[a] = commutator(A[a], t.Phi);
        for (int b = 0; b < 4; ++b) t.Omega[a][b] = commutator(A[a], A[b]);
    }
    return t;
}

}  // namespace spectral_torsion
