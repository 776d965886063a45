#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace spectral_torsion {

inline constexpr int kMaxRank = 8;
using MultiIndex = std::array<int, kMaxRank>;

namespace detail {

inline std::size_t ipow(int n, int k) {
    std::size_t p = 1;
    for (int i = 0; i < k; ++i) p *= static_cast<std::size_t>(n);
    return p;
}

inline long factorial(int k) {
    long f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

struct SignedPermutation {
    std::array<int, kMaxRank> perm{};
    int sign = 1;
};

// All permutations of {0..k-1} with their signs, lexicographic order.
inline const std::vector<SignedPermutation>& permutations(int k) {
    static const auto table = [] {
        std::array<std::vector<SignedPermutation>, 6> t;
        for (int m = 0; m < 6; ++m) {
            std::array<int, kMaxRank> p{};
            std::iota(p.begin(), p.begin() + m, 0);
            do {
                SignedPermutation sp;
                sp.perm = p;
                int inversions = 0;
                for (int i = 0; i < m; ++i)
                    for (int j = i + 1; j < m; ++j)
                        if (p[i] > p[j]) ++inversions;
                sp.sign = inversions % 2 ? -1 : 1;
                t[m].push_back(sp);
            } while (std::next_permutation(p.begin(), p.begin() + m));
        }
        return t;
    }();
    if (k < 0 || k >= 6) throw ShapeError("permutations supported for rank < 6");
    return table[k];
}

}  // namespace detail

// Sign of the permutation taking (0,1,..,n-1) to idx, or 0 if idx repeats.
inline int levi_civita(std::span<const int> idx) {
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            if (idx[i] == idx[j]) return 0;
            if (idx[i] > idx[j]) sign = -sign;
        }
    return sign;
}

template <Scalar S>
class Tensor {
public:
    Tensor() = default;
    Tensor(int dim, int rank) : dim_(dim), rank_(rank) {
        if (dim < 1) throw ShapeError("tensor dimension must be positive");
        if (rank < 0 || rank > kMaxRank) throw ShapeError("tensor rank out of range");
        data_.assign(detail::ipow(dim, rank), ScalarTraits<S>::zero());
    }

    int dim() const { return dim_; }
    int rank() const { return rank_; }
    std::size_t size() const { return data_.size(); }

    S& operator[](std::size_t flat) { return data_[flat]; }
    const S& operator[](std::size_t flat) const { return data_[flat]; }

    template <class... I>
    S& operator()(I... idx) {
        return data_[offset(idx...)];
    }
    template <class... I>
    const S& operator()(I... idx) const {
        return data_[offset(idx...)];
    }

    S& at(const MultiIndex& idx) { return data_[flat_of(idx)]; }
    const S& at(const MultiIndex& idx) const { return data_[flat_of(idx)]; }

    std::size_t flat_of(const MultiIndex& idx) const {
        std::size_t f = 0;
        for (int s = 0; s < rank_; ++s) f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx[s]);
        return f;
    }

    MultiIndex index_of(std::size_t flat) const {
        MultiIndex idx{};
        for (int s = rank_ - 1; s >= 0; --s) {
            idx[s] = static_cast<int>(flat % static_cast<std::size_t>(dim_));
            flat /= static_cast<std::size_t>(dim_);
        }
        return idx;
    }

    std::span<const S> components() const { return data_; }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const S& x) { return ScalarTraits<S>::is_zero(x); });
    }

    Tensor& operator+=(const Tensor& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Tensor& operator-=(const Tensor& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Tensor& operator*=(const S& s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
    friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
    friend Tensor operator*(Tensor a, const S& s) { return a *= s; }
    friend Tensor operator*(const S& s, Tensor a) { return a *= s; }
    friend Tensor operator-(Tensor a) {
        for (auto& x : a.data_) x = -x;
        return a;
    }
    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.dim_ == b.dim_ && a.rank_ == b.rank_ && a.data_ == b.data_;
    }

    void require_same_shape(const Tensor& o) const {
        if (dim_ != o.dim_ || rank_ != o.rank_)
            throw ShapeError("shape mismatch: (dim " + std::to_string(dim_) + ", rank " + std::to_string(rank_) +
                             ") vs (dim " + std::to_string(o.dim_) + ", rank " + std::to_string(o.rank_) + ")");
    }

private:
    template <class... I>
    std::size_t offset(I... idx) const {
        static_assert((std::is_integral_v<I> && ...));
        if (static_cast<int>(sizeof...(I)) != rank_) throw ShapeError("wrong number of indices");
        std::size_t f = 0;
        ((f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx)), ...);
        return f;
    }

    int dim_ = 0;
    int rank_ = 0;
    std::vector<S> data_;
};

template <Scalar S>
bool near(const Tensor<S>& a, const Tensor<S>& b, Tolerance tol = {}) {
    if (a.dim() != b.dim() || a.rank() != b.rank()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!near(a[i], b[i], tol)) return false;
    return true;
}

template <Scalar S>
S tensor_inner(const Tensor<S>& p, const Tensor<S>& q) {
    p.require_same_shape(q);
    S acc = ScalarTraits<S>::zero();
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * q[i];
    return acc;
}

template <Scalar S>
S norm2(const Tensor<S>& p) {
    return tensor_inner(p, p);
}

// result(x_0..x_{k-1}) = p(x_{perm[0]}, .., x_{perm[k-1]})
template <Scalar S>
Tensor<S> permute_slots(const Tensor<S>& p, const std::array<int, kMaxRank>& perm) {
    Tensor<S> out(p.dim(), p.rank());
    for (std::size_t f = 0; f < out.size(); ++f) {
        MultiIndex x = out.index_of(f);
        MultiIndex y{};
        for (int s = 0; s < p.rank(); ++s) y[s] = x[perm[s]];
        out[f] = p.at(y);
    }
    return out;
}

template <Scalar S>
Tensor<S> antisymmetrize(const Tensor<S>& p) {
    int k = p.rank();
    if (k > p.dim()) throw ShapeError("antisymmetrize: rank exceeds dimension");
    Tensor<S> out(p.dim(), k);
    for (const auto& sp : detail::permutations(k)) {
        Tensor<S> term = permute_slots(p, sp.perm);
        if (sp.sign > 0)
            out += term;
        else
            out -= term;
    }
    out *= ratio<S>(1, detail::factorial(k));
    return out;
}

// Exact equality for exact scalars, default-tolerance closeness for floats.
template <Scalar S>
bool same_tensor(const Tensor<S>& a, const Tensor<S>& b) {
    if constexpr (ScalarTraits<S>::exact)
        return a == b;
    else
        return near(a, b);
}

// Alternating in the given contiguous slot range [first, last).
template <Scalar S>
bool is_alternating(const Tensor<S>& p, int first = 0, int last = -1) {
    if (last < 0) last = p.rank();
    for (int a = first; a < last; ++a)
        for (int b = a + 1; b < last; ++b) {
            std::array<int, kMaxRank> perm{};
            std::iota(perm.begin(), perm.end(), 0);
            std::swap(perm[a], perm[b]);
            if (!same_tensor(permute_slots(p, perm), Tensor<S>(-p))) return false;
        }
    return true;
}

template <Scalar S>
Tensor<S> tensor_product(const Tensor<S>& a, const Tensor<S>& b) {
    if (a.dim() != b.dim()) throw ShapeError("tensor_product: dimension mismatch");
    Tensor<S> out(a.dim(), a.rank() + b.rank());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
    return out;
}

template <Scalar S>
Tensor<S> wedge(const Tensor<S>& alpha, const Tensor<S>& beta) {
    int p = alpha.rank();
    int q = beta.rank();
    if (alpha.dim() != beta.dim()) throw ShapeError("wedge: dimension mismatch");
    if (p + q > alpha.dim()) throw ShapeError("wedge: degree exceeds dimension");
    Tensor<S> out = antisymmetrize(tensor_product(alpha, beta));
    out *= ratio<S>(detail::factorial(p + q), detail::factorial(p) * detail::factorial(q));
    return out;
}

// (v ⌟ alpha)(x_2..x_k) = sum_i v_i alpha(e_i, x_2..x_k)
template <Scalar S>
Tensor<S> interior(const Tensor<S>& v, const Tensor<S>& alpha) {
    if (v.rank() != 1) throw ShapeError("interior: first argument must be a vector");
    if (alpha.rank() < 1) throw ShapeError("interior: cannot contract a 0-form");
    if (v.dim() != alpha.dim()) throw ShapeError("interior: dimension mismatch");
    Tensor<S> out(alpha.dim(), alpha.rank() - 1);
    std::size_t block = out.size();
    for (int i = 0; i < v.dim(); ++i)
        for (std::size_t j = 0; j < block; ++j) out[j] += v[i] * alpha[i * block + j];
    return out;
}

template <Scalar S>
Tensor<S> metric(int n) {
    Tensor<S> g(n, 2);
    for (int i = 0; i < n; ++i) g(i, i) = ScalarTraits<S>::one();
    return g;
}

// Volume form with value +1 on (e_1, .., e_n) in index order.
template <Scalar S>
Tensor<S> volume_form(int n) {
    Tensor<S> w(n, n);
    for (std::size_t f = 0; f < w.size(); ++f) {
        MultiIndex idx = w.index_of(f);
        int e = levi_civita(std::span<const int>(idx.data(), static_cast<std::size_t>(n)));
        if (e != 0) w[f] = ratio<S>(e, 1);
    }
    return w;
}

template <Scalar S>
Tensor<S> basis_vector(int n, int i) {
    Tensor<S> v(n, 1);
    v(i) = ScalarTraits<S>::one();
    return v;
}

// Hodge star of a k-form: (*a)_{j..} = (1/k!) sum a_{i1..ik} eps_{i1..ik j..}
template <Scalar S>
Tensor<S> hodge_star(const Tensor<S>& alpha) {
    int n = alpha.dim();
    int k = alpha.rank();
    if (k > n) throw ShapeError("hodge_star: rank exceeds dimension");
    Tensor<S> out(n, n - k);
    Tensor<S> eps = volume_form<S>(n);
    std::size_t tail = out.size();
    for (std::size_t a = 0; a < alpha.size(); ++a) {
        if (ScalarTraits<S>::is_zero(alpha[a])) continue;
        for (std::size_t j = 0; j < tail; ++j) {
            const S& e = eps[a * tail + j];
            if (!ScalarTraits<S>::is_zero(e)) out[j] += alpha[a] * e;
        }
    }
    out *= ratio<S>(1, detail::factorial(k));
    return out;
}

// d from the covariant gradient of a k-form (derivative slot first):
// d alpha = (k+1) Alt(grad alpha).
template <Scalar S>
Tensor<S> exterior_derivative(const Tensor<S>& grad) {
    if (grad.rank() < 1) throw ShapeError("exterior_derivative: gradient must have rank >= 1");
    if (grad.rank() > grad.dim()) return Tensor<S>(grad.dim(), grad.rank());
    Tensor<S> out = antisymmetrize(grad);
    out *= ratio<S>(grad.rank(), 1);
    return out;
}

// delta alpha = -sum_i grad_{i i ..}
template <Scalar S>
Tensor<S> codifferential(const Tensor<S>& grad) {
    if (grad.rank() < 2) throw ShapeError("codifferential: gradient must have rank >= 2");
    int n = grad.dim();
    Tensor<S> out(n, grad.rank() - 2);
    std::size_t tail = out.size();
    for (int i = 0; i < n; ++i) {
        std::size_t base = (static_cast<std::size_t>(i) * n + i) * tail;
        for (std::size_t j = 0; j < tail; ++j) out[j] -= grad[base + j];
    }
    return out;
}

template <Scalar S>
S trace2(const Tensor<S>& k) {
    if (k.rank() != 2) throw ShapeError("trace of a non-bilinear form");
    S acc = ScalarTraits<S>::zero();
    for (int i = 0; i < k.dim(); ++i) acc += k(i, i);
    return acc;
}

template <Scalar S>
Tensor<S> transpose2(const Tensor<S>& k) {
    Tensor<S> out(k.dim(), 2);
    for (int i = 0; i < k.dim(); ++i)
        for (int j = 0; j < k.dim(); ++j) out(i, j) = k(j, i);
    return out;
}

template <Scalar S>
Tensor<S> symmetric_part(const Tensor<S>& k) {
    Tensor<S> out = k + transpose2(k);
    out *= ratio<S>(1, 2);
    return out;
}

template <Scalar S>
Tensor<S> antisymmetric_part(const Tensor<S>& k) {
    Tensor<S> out = k - transpose2(k);
    out *= ratio<S>(1, 2);
    return out;
}

template <Scalar S, class F>
Tensor<S> tensor_from(int n, int rank, F&& f) {
    Tensor<S> out(n, rank);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(out.index_of(i));
    return out;
}

template <RealScalar R>
Tensor<double> to_double(const Tensor<R>& t) {
    Tensor<double> out(t.dim(), t.rank());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = RealTraits<R>::to_double(t[i]);
    return out;
}

}  // namespace spectral_torsion
