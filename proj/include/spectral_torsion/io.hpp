#pragma once

// JSON reading and writing for jets, twists, density reports and heat-trace fits.
// Exact values travel as strings ("p/q", integers or decimals); JSON numbers are
// accepted too and read through their decimal text.

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spectral_action.hpp"
#include "torus_lab.hpp"

namespace spectral_torsion {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace io {

inline std::string child(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline std::string child(const std::string& path, std::size_t index) {
    return path + "[" + std::to_string(index) + "]";
}

inline const Json& field(const Json& obj, std::string_view key, const std::string& path) {
    if (!obj.is_object()) throw InputError(path.empty() ? "$" : path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(child(path, key), "missing field");
    return *it;
}

template <RealScalar R>
R read_real(const Json& v, const std::string& path) {
    std::string text;
    if (v.is_string())
        text = v.get<std::string>();
    else if (v.is_number())
        text = v.dump();
    else
        throw InputError(path, "expected a number or a numeric string, got " + std::string(v.type_name()));
    try {
        return parse_real<R>(text);
    } catch (const std::invalid_argument& e) {
        throw InputError(path, e.what());
    }
}

template <RealScalar R>
Json write_real(const R& x) {
    if constexpr (RealTraits<R>::exact)
        return RealTraits<R>::format(x);
    else
        return x;
}

inline int read_int(const Json& v, const std::string& path) {
    if (!v.is_number_integer()) throw InputError(path, "expected an integer");
    return v.get<int>();
}

template <RealScalar R>
Gaussian<R> read_complex(const Json& v, const std::string& path) {
    if (v.is_array()) {
        if (v.size() != 2) throw InputError(path, "complex entries are [re, im] pairs");
        return {read_real<R>(v[0], child(path, 0)), read_real<R>(v[1], child(path, 1))};
    }
    return Gaussian<R>(read_real<R>(v, path));
}

template <RealScalar R>
Json write_complex(const Gaussian<R>& z) {
    return Json::array({write_real(z.re), write_real(z.im)});
}

inline void require_array(const Json& v, std::size_t size, const std::string& path) {
    if (!v.is_array()) throw InputError(path, "expected an array");
    if (v.size() != size)
        throw InputError(path, "expected " + std::to_string(size) + " entries, got " + std::to_string(v.size()));
}

template <RealScalar R>
Tensor<R> read_tensor(const Json& v, int n, int rank, const std::string& path) {
    Tensor<R> t(n, rank);
    if (rank == 0) {
        t[0] = read_real<R>(v, path);
        return t;
    }
    MultiIndex idx{};
    auto fill = [&](auto&& self, const Json& node, int depth, const std::string& p) -> void {
        require_array(node, static_cast<std::size_t>(n), p);
        for (int i = 0; i < n; ++i) {
            idx[depth] = i;
            std::string cp = child(p, static_cast<std::size_t>(i));
            if (depth + 1 == rank)
                t.at(idx) = read_real<R>(node[i], cp);
            else
                self(self, node[i], depth + 1, cp);
        }
    };
    fill(fill, v, 0, path);
    return t;
}

template <RealScalar R>
Json write_tensor(const Tensor<R>& t) {
    if (t.rank() == 0) return write_real(t[0]);
    MultiIndex idx{};
    auto emit = [&](auto&& self, int depth) -> Json {
        Json arr = Json::array();
        for (int i = 0; i < t.dim(); ++i) {
            idx[depth] = i;
            arr.push_back(depth + 1 == t.rank() ? write_real(t.at(idx)) : self(self, depth + 1));
        }
        return arr;
    };
    return emit(emit, 0);
}

template <RealScalar R>
CMatrix<R> read_matrix(const Json& v, int m, const std::string& path) {
    require_array(v, static_cast<std::size_t>(m), path);
    CMatrix<R> out(m, m);
    for (int a = 0; a < m; ++a) {
        std::string row = child(path, static_cast<std::size_t>(a));
        require_array(v[a], static_cast<std::size_t>(m), row);
        for (int b = 0; b < m; ++b) out(a, b) = read_complex<R>(v[a][b], child(row, static_cast<std::size_t>(b)));
    }
    return out;
}

template <RealScalar R>
Json write_matrix(const CMatrix<R>& x) {
    Json rows = Json::array();
    for (int a = 0; a < x.rows(); ++a) {
        Json row = Json::array();
        for (int b = 0; b < x.cols(); ++b) row.push_back(write_complex(x(a, b)));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace io

inline Json parse_json_text(const std::string& text, const std::string& source = "$") {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InputError(source, std::string("malformed JSON: ") + e.what());
    }
}

inline Json load_json_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw InputError(file, "cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), file);
}

// ---------------------------------------------------------------------------
// Jets: {n, V, gradV, T, gradT, riem_g, lapRg}; lapRg defaults to 0.

template <RealScalar R>
JetFields<R> jet_fields_from_json(const Json& doc) {
    using namespace io;
    int n = doc.contains("n") ? read_int(doc["n"], "n") : 4;
    if (n < 3 || n > 8) throw InputError("n", "dimension must lie in 3..8");
    JetFields<R> f;
    f.n = n;
    f.V = read_tensor<R>(field(doc, "V", ""), n, 1, "V");
    f.gradV = read_tensor<R>(field(doc, "gradV", ""), n, 2, "gradV");
    f.T = read_tensor<R>(field(doc, "T", ""), n, 3, "T");
    f.gradT = read_tensor<R>(field(doc, "gradT", ""), n, 4, "gradT");
    f.riem_g = read_tensor<R>(field(doc, "riem_g", ""), n, 4, "riem_g");
    f.lapRg = doc.contains("lapRg") ? read_real<R>(doc["lapRg"], "lapRg") : RealTraits<R>::zero();
    return f;
}

template <RealScalar R>
Json as_json(const JetFields<R>& f) {
    using io::write_tensor;
    return Json{{"n", f.n},
                {"V", write_tensor(f.V)},
                {"gradV", write_tensor(f.gradV)},
                {"T", write_tensor(f.T)},
                {"gradT", write_tensor(f.gradT)},
                {"riem_g", write_tensor(f.riem_g)},
                {"lapRg", io::write_real(f.lapRg)}};
}

// ---------------------------------------------------------------------------
// Twists: {m, gamma_diag, Phi, gradPhi[4], Omega[4][4], dV_phi2?}; complex
// entries are [re, im] pairs or plain reals.

template <RealScalar R>
TwistData<R> twist_from_json(const Json& doc) {
    using namespace io;
    int m = read_int(field(doc, "m", ""), "m");
    if (m < 1) throw InputError("m", "twist rank must be positive");
    TwistData<R> t = TwistData<R>::trivial(m);
    const Json& gd = field(doc, "gamma_diag", "");
    require_array(gd, static_cast<std::size_t>(m), "gamma_diag");
    for (int a = 0; a < m; ++a) {
        int s = read_int(gd[a], child("gamma_diag", static_cast<std::size_t>(a)));
        if (s != 1 && s != -1) throw InputError(child("gamma_diag", static_cast<std::size_t>(a)), "chirality must be +1 or -1");
        t.gamma_diag[static_cast<std::size_t>(a)] = s;
    }
    t.Phi = read_matrix<R>(field(doc, "Phi", ""), m, "Phi");
    const Json& gp = field(doc, "gradPhi", "");
    require_array(gp, 4, "gradPhi");
    for (int i = 0; i < 4; ++i)
        t.gradPhi[static_cast<std::size_t>(i)] = read_matrix<R>(gp[i], m, child("gradPhi", static_cast<std::size_t>(i)));
    const Json& om = field(doc, "Omega", "");
    require_array(om, 4, "Omega");
    for (int a = 0; a < 4; ++a) {
        std::string row = child("Omega", static_cast<std::size_t>(a));
        require_array(om[a], 4, row);
        for (int b = 0; b < 4; ++b) t.Omega[a][b] = read_matrix<R>(om[a][b], m, child(row, static_cast<std::size_t>(b)));
    }
    if (doc.contains("dV_phi2")) t.dV_phi2 = read_real<R>(doc["dV_phi2"], "dV_phi2");
    return t;
}

template <RealScalar R>
Json as_json(const TwistData<R>& t) {
    using io::write_matrix;
    Json gp = Json::array(), om = Json::array();
    for (const auto& g : t.gradPhi) gp.push_back(write_matrix(g));
    for (const auto& row : t.Omega) {
        Json r = Json::array();
        for (const auto& x : row) r.push_back(write_matrix(x));
        om.push_back(std::move(r));
    }
    Json doc{{"m", t.m}, {"gamma_diag", t.gamma_diag}, {"Phi", write_matrix(t.Phi)}, {"gradPhi", gp}, {"Omega", om}};
    if (t.dV_phi2) doc["dV_phi2"] = io::write_real(*t.dV_phi2);
    return doc;
}

// ---------------------------------------------------------------------------
// Density reports.

template <RealScalar R>
Json as_json(const SeeleyReport<R>& r) {
    using io::write_real;
    Json terms = Json::array();
    for (const auto& t : r.terms) terms.push_back({{"name", t.name}, {"order", t.order}, {"value", write_real(t.value)}});
    return Json{{"schema", kSchemaVersion},
                {"kind", "seeley_report"},
                {"arith", RealTraits<R>::exact ? "rational" : "float"},
                {"operator", r.operator_name},
                {"method", r.method},
                {"integrated", r.integrated},
                {"pi_power", r.pi_power},
                {"coefficients", {{"a0", write_real(r.a0)}, {"a2", write_real(r.a2)}, {"a4", write_real(r.a4)}}},
                {"numeric", {{"a0", r.numeric(0)}, {"a2", r.numeric(2)}, {"a4", r.numeric(4)}}},
                {"terms", terms}};
}

template <RealScalar R>
SeeleyReport<R> seeley_report_from_json(const Json& doc) {
    using namespace io;
    int schema = read_int(field(doc, "schema", ""), "schema");
    if (schema != kSchemaVersion) throw InputError("schema", "unsupported schema version " + std::to_string(schema));
    SeeleyReport<R> r;
    const Json& name = field(doc, "operator", "");
    const Json& method = field(doc, "method", "");
    if (!name.is_string()) throw InputError("operator", "expected a string");
    if (!method.is_string()) throw InputError("method", "expected a string");
    r.operator_name = name.get<std::string>();
    r.method = method.get<std::string>();
    const Json& integrated = field(doc, "integrated", "");
    if (!integrated.is_boolean()) throw InputError("integrated", "expected a boolean");
    r.integrated = integrated.get<bool>();
    r.pi_power = read_int(field(doc, "pi_power", ""), "pi_power");
    const Json& terms = field(doc, "terms", "");
    if (!terms.is_array()) throw InputError("terms", "expected an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        std::string p = child("terms", i);
        const Json& tn = field(terms[i], "name", p);
        if (!tn.is_string()) throw InputError(child(p, "name"), "expected a string");
        int order = read_int(field(terms[i], "order", p), child(p, "order"));
        if (order != 0 && order != 2 && order != 4) throw InputError(child(p, "order"), "order must be 0, 2 or 4");
        r.add(order, tn.get<std::string>(), read_real<R>(field(terms[i], "value", p), child(p, "value")));
    }
    const Json& coeffs = field(doc, "coefficients", "");
    for (int order : {0, 2, 4}) {
        std::string key = "a" + std::to_string(order);
        R stated = read_real<R>(field(coeffs, key, "coefficients"), child("coefficients", key));
        if (!RealTraits<R>::near(stated, r.coefficient(order)))
            throw InputError(child("coefficients", key), "coefficient does not equal the sum of its terms");
        r.coefficient(order) = stated;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Heat-trace fits.

inline Json as_json(const TorusSpec& s) {
    std::vector<double> V(4);
    for (int i = 0; i < 4; ++i) V[static_cast<std::size_t>(i)] = s.V(i);
    return Json{{"T123", s.T(0, 1, 2)}, {"V", V}, {"cutoff", s.cutoff}, {"times", s.times}, {"chiral", s.chiral}};
}

namespace io {

inline Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json triple(const std::array<double, 3>& a) {
    return Json::array({finite_or_null(a[0]), finite_or_null(a[1]), finite_or_null(a[2])});
}

}  // namespace io

inline Json as_json(const FitResult& f, const Json& spec, bool include_runtime = true) {
    Json doc{{"schema", kSchemaVersion},
             {"kind", "heat_fit"},
             {"spec", spec},
             {"K", f.cutoff},
             {"modes", f.modes},
             {"times", f.times},
             {"a_hat", io::triple(f.a_hat)},
             {"a_analytic", io::triple(f.analytic)},
             {"abs_errors", io::triple(f.abs_err)},
             {"rel_errors", io::triple(f.rel_err)},
             {"residual", f.residual},
             {"condition", f.condition}};
    if (include_runtime) doc["runtime_ms"] = f.runtime_ms;
    return doc;
}

}  // namespace spectral_torsion
