#include "normsym/scenario.hpp"

#include "normsym/calculus.hpp"
#include "normsym/elliptic.hpp"
#include "normsym/phase.hpp"
#include "normsym/quantize.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace normsym {

// -------------------------------------------------------------------- parse

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

TaskKind task_from_string(const std::string& s, int line) {
    if (s == "Quantize") return TaskKind::Quantize;
    if (s == "ExtractSymbol") return TaskKind::ExtractSymbol;
    if (s == "SharpCompare") return TaskKind::SharpCompare;
    if (s == "AdjointCompare") return TaskKind::AdjointCompare;
    if (s == "Parametrix") return TaskKind::Parametrix;
    if (s == "EllipticityTest") return TaskKind::EllipticityTest;
    if (s == "GeometrySelfTest") return TaskKind::GeometrySelfTest;
    throw ParseError("scenario line " + std::to_string(line) + ": unknown task type '" + s + "'");
}

} // namespace

Scenario Scenario::parse(const std::string& text) {
    Scenario sc;
    std::istringstream in(text);
    std::string line;
    bool in_task = false;
    bool task_set = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line == "[task]") {
            if (in_task)
                throw ParseError("scenario line " + std::to_string(lineno) +
                                 ": duplicate [task] section");
            in_task = true;
            continue;
        }
        if (line.front() == '[')
            throw ParseError("scenario line " + std::to_string(lineno) + ": unknown section " +
                             line);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("scenario line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = unquote(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ParseError("scenario line " + std::to_string(lineno) + ": empty key");
        if (in_task) {
            if (key == "type") {
                sc.task = task_from_string(val, lineno);
                task_set = true;
            } else {
                sc.task_params[key] = val;
            }
        } else {
            sc.globals[key] = val;
        }
    }
    if (!in_task || !task_set) throw ParseError("scenario: missing [task] section with a type");
    if (auto it = sc.globals.find("seed"); it != sc.globals.end())
        sc.seed = (uint64_t)std::stoull(it->second);
    if (auto it = sc.globals.find("name"); it != sc.globals.end()) sc.name = it->second;
    return sc;
}

Scenario Scenario::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("scenario: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    Scenario sc = parse(ss.str());
    if (sc.name.empty()) sc.name = std::filesystem::path(path).stem().string();
    return sc;
}

std::string Scenario::get(const std::string& key, const std::string& fallback) const {
    if (auto it = task_params.find(key); it != task_params.end()) return it->second;
    if (auto it = globals.find(key); it != globals.end()) return it->second;
    return fallback;
}

double Scenario::get_num(const std::string& key, double fallback) const {
    std::string v = get(key);
    if (v.empty()) return fallback;
    try {
        return std::stod(v);
    } catch (...) {
        throw ScenarioInvalid("scenario: field '" + key + "' is not a number: " + v);
    }
}

// ---------------------------------------------------------------------- run

namespace {

std::shared_ptr<const Manifold> manifold_from(const Scenario& sc) {
    std::string kind = sc.get("manifold");
    if (kind == "circle") return make_circle(sc.get_num("radius", 1.0));
    if (kind == "flattorus") {
        Vec P(2);
        P << sc.get_num("period1", 2 * pi), sc.get_num("period2", 2 * pi);
        return make_flat_torus(P);
    }
    if (kind == "sphere2") return make_sphere2(sc.get_num("radius", 1.0));
    if (kind == "chart") {
        std::string path = sc.get("chart_json");
        if (path.empty()) throw ScenarioInvalid("scenario: chart manifold needs chart_json");
        std::ifstream f(path);
        if (!f) throw ScenarioInvalid("scenario: cannot open chart_json " + path);
        std::stringstream ss;
        ss << f.rdbuf();
        return make_generic_chart_from_json(ss.str());
    }
    throw ScenarioInvalid("scenario: unknown or missing manifold '" + kind + "'");
}

Symbol symbol_from(const Scenario& sc, const std::shared_ptr<const Manifold>& m,
                   const std::string& prefix) {
    std::string expr = sc.get(prefix);
    std::string radial = sc.get(prefix + "_radial");
    std::string polyjson = sc.get(prefix + "_poly_json");
    double order = sc.get_num("order_" + prefix, 0.0);
    double rho = sc.get_num("rho", 1.0), delta = sc.get_num("delta", 0.0);
    int count = (!expr.empty()) + (!radial.empty()) + (!polyjson.empty());
    if (count != 1)
        throw ScenarioInvalid("scenario: specify exactly one of '" + prefix + "', '" + prefix +
                              "_radial', '" + prefix + "_poly_json'");
    try {
        if (!expr.empty()) return symbol_from_expression(m, expr, SymbolClass(order, rho, delta));
        if (!radial.empty()) return radial_symbol(m, radial, SymbolClass(order, rho, delta));
        return polynomial_from_json(m, polyjson);
    } catch (const ParseError& e) {
        throw ScenarioInvalid("scenario: symbol '" + prefix + "': " + std::string(e.what()));
    }
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    f << header << "\n";
    char buf[64];
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            f << buf << (i + 1 < row.size() ? "," : "");
        }
        f << "\n";
    }
}

CheckResult geometry_selftest(const Scenario& sc) {
    auto m = manifold_from(sc);
    bool closed_form = m->kind() != ManifoldKind::GenericChart;
    double tol = closed_form ? 1e-8 : 1e-6;
    Rng rng(sc.seed);
    CheckResult r;
    r.name = "geometry-selftest-" + m->name();
    r.threshold = tol;
    r.csv_header = "pair,roundtrip_err,gauss_err,transport_err,rho_theta_err";
    double worst_gauss = 0, worst_rt = 0, worst_tr = 0, worst_rho = 0;
    int pairs = (int)sc.get_num("pairs", 100);
    for (int i = 0; i < pairs; ++i) {
        Vec x = m->random_point(rng);
        double rad = rng.uniform(0.05, (closed_form ? 0.8 : 0.45) * m->injectivity_radius());
        int d = m->dim();
        Vec v(d);
        if (d == 1)
            v << (rng.uniform(0.0, 1.0) < 0.5 ? -rad : rad);
        else {
            double th = rng.uniform(0.0, 2 * pi);
            v << rad * std::cos(th), rad * std::sin(th);
        }
        Vec y = m->exp(x, v);
        double rt = (m->log(x, y) - v).norm();
        Mat F = m->transport_frame(x, v);
        double gauss = (v + F.transpose() * m->log(y, x)).norm();
        Vec w(d);
        for (int k = 0; k < d; ++k) w[k] = rng.uniform(-1.0, 1.0);
        double tr = std::abs(m->transport(x, v, w).norm() - w.norm());
        double rho_theta = std::abs(m->density_rho(x, y) - std::abs(m->theta(x, y).determinant()));
        worst_rt = std::max(worst_rt, rt);
        worst_gauss = std::max(worst_gauss, gauss);
        worst_tr = std::max(worst_tr, tr);
        worst_rho = std::max(worst_rho, rho_theta);
        r.csv_rows.push_back({(double)i, rt, gauss, tr, rho_theta});
    }
    r.value = std::max({worst_rt, worst_gauss, worst_tr, worst_rho});
    r.metrics["gauss_lemma_max_err"] = worst_gauss;
    r.metrics["roundtrip_max_err"] = worst_rt;
    r.metrics["transport_isometry_max_err"] = worst_tr;
    r.metrics["rho_theta_max_err"] = worst_rho;
    r.pass = r.value <= tol;
    r.detail = "max geometry invariant error " + std::to_string(r.value);
    return r;
}

CheckResult quantize_task(const Scenario& sc, const std::string& out_dir,
                          std::vector<std::string>& artifacts) {
    auto m = manifold_from(sc);
    Mesh mesh = default_mesh(m);
    Cutoff psi(sc.get_num("inner_fraction", 0.45), sc.get_num("outer_fraction", 0.9));
    Symbol a = symbol_from(sc, m, "a");
    OpPtr A = quantize(a, mesh, psi);
    CheckResult r;
    r.name = "quantize";
    r.csv_header = "mode,out_norm";
    int nprobe = std::min(6, mesh.n_modes);
    for (int q = 0; q < nprobe; ++q) {
        CVec e(mesh.nodes.size());
        for (int j = 0; j < (int)mesh.nodes.size(); ++j) e[j] = mesh.basis_at(q, mesh.nodes[j]);
        FieldSpec fs;
        fs.node_values = e;
        r.csv_rows.push_back({(double)q, A->apply(fs).norm()});
    }
    std::string exportfmt = sc.get("export");
    if (exportfmt == "binary" || exportfmt == "csv") {
        if ((long)mesh.nodes.size() * (long)mesh.nodes.size() > 40000000L)
            throw ScenarioInvalid("scenario: operator too large to materialize");
        CMat M = A->to_matrix();
        std::string path = out_dir + "/operator." + (exportfmt == "binary" ? "nsb" : "csv");
        if (exportfmt == "binary")
            write_matrix_binary(path, M);
        else
            write_matrix_csv(path, M);
        artifacts.push_back(path);
    }
    r.pass = true;
    r.value = 0;
    r.detail = "assembled " + A->provenance();
    return r;
}

CheckResult extract_task(const Scenario& sc) {
    auto m = manifold_from(sc);
    Mesh mesh = default_mesh(m);
    Cutoff psi(sc.get_num("inner_fraction", 0.45), sc.get_num("outer_fraction", 0.9));
    Symbol a = symbol_from(sc, m, "a");
    OpPtr A = quantize(a, mesh, psi);
    double lo = sc.get_num("shell_min", 2.0), hi = sc.get_num("shell_max", mesh.nyquist / 4);
    int n = (int)sc.get_num("samples", 8);
    Rng rng(sc.seed);
    CheckResult r;
    r.name = "extract-symbol";
    r.threshold = sc.get_num("tolerance", 1e-3);
    r.csv_header = "radius,got_re,got_im,want_re,want_im,normalized_err";
    double mu = a.sclass().order;
    double worst = 0;
    auto dirs = fiber_directions(m->dim(), 3);
    for (int i = 0; i < n; ++i) {
        double rr = lo * std::pow(hi / lo, n == 1 ? 0.0 : (double)i / (n - 1));
        Covector xi{m->random_point(rng), rr * dirs[i % dirs.size()]};
        cplx got = extract_symbol(*A, xi, psi)(0, 0);
        cplx want = a.eval(xi)(0, 0);
        double err = std::abs(got - want) / std::pow(1.0 + rr, mu);
        worst = std::max(worst, err);
        r.csv_rows.push_back({rr, got.real(), got.imag(), want.real(), want.imag(), err});
    }
    r.value = worst;
    r.pass = worst <= r.threshold;
    r.detail = "normalized round-trip defect " + std::to_string(worst);
    return r;
}

CheckResult sharp_compare_task(const Scenario& sc) {
    auto m = manifold_from(sc);
    if (m->kind() == ManifoldKind::GenericChart)
        throw ScenarioInvalid("scenario: SharpCompare needs a builtin manifold");
    Mesh mesh = default_mesh(m);
    Cutoff psi(sc.get_num("inner_fraction", 0.45), sc.get_num("outer_fraction", 0.9));
    Symbol a = symbol_from(sc, m, "a");
    Symbol b = symbol_from(sc, m, "b");
    OpPtr A = quantize(a, mesh, psi);
    OpPtr B = quantize(b, mesh, psi);
    Symbol ab = sharp_product(a, b, ExpansionConfig((int)sc.get_num("order_drop", 2)));
    double lo = sc.get_num("shell_min", 4.0), hi = sc.get_num("shell_max", 16.0);
    int n = (int)sc.get_num("samples", 5);
    Rng rng(sc.seed);
    Vec x = m->random_point(rng);
    Vec dir = fiber_directions(m->dim(), 5)[1];
    CheckResult r;
    r.name = "sharp-compare";
    r.csv_header = "radius,err";
    std::vector<double> rs, ds;
    for (int i = 0; i < n; ++i) {
        double rr = lo * std::pow(hi / lo, n == 1 ? 0.0 : (double)i / (n - 1));
        Covector xi{x, rr * dir};
        FieldSpec w = plane_wave_field(mesh, xi, psi);
        FieldSpec mid;
        mid.node_values = B->apply(w);
        cplx got = A->apply_at(mid, x);
        cplx pred = ab.eval(xi)(0, 0);
        rs.push_back(1 + rr);
        ds.push_back(std::abs(got - pred));
        r.csv_rows.push_back({rr, ds.back()});
    }
    double slope = fit_loglog_slope(rs, ds);
    r.value = slope;
    r.threshold = sc.get_num("tolerance_slope", a.sclass().order + b.sclass().order - 3.0 + 0.5);
    r.pass = slope <= r.threshold;
    r.detail = "|sharp - extracted composition| slope " + std::to_string(slope);
    return r;
}

CheckResult adjoint_compare_task(const Scenario& sc) {
    auto m = manifold_from(sc);
    Mesh mesh = default_mesh(m);
    Cutoff psi(sc.get_num("inner_fraction", 0.45), sc.get_num("outer_fraction", 0.9));
    Symbol a = symbol_from(sc, m, "a");
    OpPtr A = quantize(a, mesh, psi);
    OpPtr Astar = adjoint_quantize(a, mesh, psi);
    Rng rng(sc.seed);
    int n = (int)mesh.nodes.size();
    CVec f = CVec::Zero(n), g = CVec::Zero(n);
    for (int t = 0; t < 8; ++t) {
        int q = rng.uniform_int(0, mesh.n_modes - 1);
        Vec cov = mesh.m->kind() == ManifoldKind::Sphere2
                      ? Vec::Zero(2)
                      : mesh.mode_covectors[q];
        double freq = mesh.m->kind() == ManifoldKind::Sphere2
                          ? (double)mesh.sphere_lm[q].first
                          : cov.norm();
        if (freq > mesh.nyquist / 3) continue;
        CVec e(n);
        for (int j = 0; j < n; ++j) e[j] = mesh.basis_at(q, mesh.nodes[j]);
        f += cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)) * e;
        g += cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)) * e;
    }
    FieldSpec ff, gg;
    ff.node_values = f;
    gg.node_values = g;
    cplx lhs = mesh.dot(A->apply(ff), g);
    cplx rhs = mesh.dot(f, Astar->apply(gg));
    CheckResult r;
    r.name = "adjoint-pairing";
    r.threshold = sc.get_num("tolerance", 1e-8);
    r.value = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
    r.pass = r.value <= r.threshold;
    r.detail = "pairing defect " + std::to_string(r.value);
    return r;
}

CheckResult parametrix_task(const Scenario& sc) {
    auto m = manifold_from(sc);
    Symbol a = symbol_from(sc, m, "a");
    Symbol b0 = symbol_from(sc, m, "b0");
    int N = (int)sc.get_num("order_drop", m->is_flat() ? 2 : 3);
    ExpansionConfig cfg(N, N <= 2 ? ExpansionMode::CurvatureExact : ExpansionMode::FiniteDifference);
    auto res = neumann_parametrix(a, b0, cfg, (int)sc.get_num("max_terms", 8),
                                  sc.get_num("tol_order", -6.0), sc.get_num("shell_min", 8.0),
                                  sc.get_num("shell_max", 128.0));
    CheckResult r;
    r.name = "parametrix";
    r.threshold = sc.get_num("tol_order", -6.0);
    r.value = res.residual_zero ? -999.0 : res.residual_order_right;
    r.metrics["terms_used"] = res.terms_used;
    r.metrics["residual_order_left"] = res.residual_order_left;
    r.metrics["residual_zero"] = res.residual_zero ? 1.0 : 0.0;
    r.pass = res.converged;
    r.csv_header = "step,residual_order";
    for (size_t i = 0; i < res.history.size(); ++i)
        r.csv_rows.push_back({(double)(i + 1), res.history[i]});
    r.detail = "terms_used = " + std::to_string(res.terms_used) +
               (res.residual_zero ? ", residual 0"
                                  : ", residual order " + std::to_string(r.value));
    return r;
}

CheckResult ellipticity_task(const Scenario& sc, std::vector<std::string>& artifacts,
                             const std::string& out_dir) {
    auto m = manifold_from(sc);
    Symbol a = symbol_from(sc, m, "a");
    SampleSet K = default_samples(*m, 3, sc.seed);
    EllipticityReport rep;
    if (!sc.get("b0").empty() || !sc.get("b0_radial").empty() ||
        !sc.get("b0_poly_json").empty()) {
        Symbol b0 = symbol_from(sc, m, "b0");
        rep = ellipticity_test_witness(a, b0, ExpansionConfig((int)sc.get_num("order_drop", 2)), K,
                                       sc.get_num("shell_min", 10.0),
                                       sc.get_num("shell_max", 300.0));
    } else {
        rep = ellipticity_test_scalar(a, sc.get_num("order_m", a.sclass().order), K,
                                      sc.get_num("shell_min", 10.0), sc.get_num("shell_max", 1e3));
    }
    std::string path = out_dir + "/ellipticity_report.json";
    std::ofstream f(path);
    f << rep.to_json() << "\n";
    artifacts.push_back(path);
    CheckResult r;
    r.name = "ellipticity";
    r.pass = rep.verdict == EllipticVerdict::EllipticOfOrder ||
             rep.verdict == EllipticVerdict::EllipticGeneral;
    std::string expect = sc.get("expect");
    if (expect == "not_elliptic") r.pass = rep.verdict == EllipticVerdict::NotElliptic;
    r.value = rep.c_bound;
    r.detail = "report written to " + path;
    return r;
}

} // namespace

ScenarioOutcome run_scenario(const Scenario& sc, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    ScenarioOutcome out;
    switch (sc.task) {
        case TaskKind::GeometrySelfTest: out.checks.push_back(geometry_selftest(sc)); break;
        case TaskKind::Quantize:
            out.checks.push_back(quantize_task(sc, out_dir, out.artifacts));
            break;
        case TaskKind::ExtractSymbol: out.checks.push_back(extract_task(sc)); break;
        case TaskKind::SharpCompare: out.checks.push_back(sharp_compare_task(sc)); break;
        case TaskKind::AdjointCompare: out.checks.push_back(adjoint_compare_task(sc)); break;
        case TaskKind::Parametrix: out.checks.push_back(parametrix_task(sc)); break;
        case TaskKind::EllipticityTest:
            out.checks.push_back(ellipticity_task(sc, out.artifacts, out_dir));
            break;
    }

    nlohmann::json j;
    j["schema_version"] = 1;
    j["name"] = sc.name.empty() ? "scenario" : sc.name;
    j["seed"] = sc.seed;
    nlohmann::json checks = nlohmann::json::array();
    std::string prefix = sc.get("out_prefix", j["name"].get<std::string>());
    for (const auto& c : out.checks) {
        out.pass = out.pass && c.pass;
        nlohmann::json cj;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        cj["value"] = c.value;
        cj["threshold"] = c.threshold;
        cj["detail"] = c.detail;
        for (const auto& [k, v] : c.metrics) cj["metrics"][k] = v;
        checks.push_back(cj);
        if (!c.csv_rows.empty()) {
            std::string path = out_dir + "/" + prefix + "_" + c.name + ".csv";
            write_csv(path, c.csv_header, c.csv_rows);
            out.artifacts.push_back(path);
        }
    }
    j["pass"] = out.pass;
    j["checks"] = checks;
    out.summary_json = j.dump(2);
    std::string spath = out_dir + "/" + prefix + "_summary.json";
    std::ofstream sf(spath);
    sf << out.summary_json << "\n";
    out.artifacts.push_back(spath);
    return out;
}

// ------------------------------------------------------------------ builtins

namespace {

struct BuiltinDef {
    const char* name;
    const char* description;
    const char* text; // scenario text, or nullptr for check-backed entries
};

const BuiltinDef kBuiltins[] = {
    {"geometry-selftest-sphere", "closed-form sphere geometry invariants (Gauss lemma et al)",
     "manifold = sphere2\n[task]\ntype = GeometrySelfTest\npairs = 100\n"},
    {"geometry-selftest-torus", "flat torus geometry invariants",
     "manifold = flattorus\n[task]\ntype = GeometrySelfTest\npairs = 100\n"},
    {"sphere-rho-expansion", "density expansion remainder slope and sin(r)/r oracle", nullptr},
    {"phase-identity", "phi_{0 beta} vanishing across builtin manifolds", nullptr},
    {"circle-quantize-eigen", "circle quantization eigenvalue checks", nullptr},
    {"inverse-pair-circle", "extract(quantize(a)) round trip on the circle", nullptr},
    {"flat-sharp-vs-classical", "sharp product vs classical composition on the torus", nullptr},
    {"sphere-sharp-curvature", "curvature correction against the composition oracle", nullptr},
    {"adjoint-pairing-circle", "operator pairing and exact adjoint symbol checks", nullptr},
    {"parametrix-flat", "one-term parametrix of 1+|xi|^2 on the torus",
     "manifold = flattorus\n[task]\ntype = Parametrix\na_radial = \"1+zeta1\"\norder_a = 2\n"
     "b0_radial = \"1/(1+zeta1)\"\norder_b0 = -2\ntol_order = -6\n"},
    {"parametrix-sphere", "curvature-corrected Neumann parametrix on the sphere",
     "manifold = sphere2\n[task]\ntype = Parametrix\na_radial = \"1+zeta1\"\norder_a = 2\n"
     "b0_radial = \"1/(1+zeta1)\"\norder_b0 = -2\norder_drop = 3\ntol_order = -4\n"
     "shell_min = 8\nshell_max = 96\nmax_terms = 4\n"},
    {"ellipticity-suite", "the acceptance ellipticity verdict battery", nullptr},
};

ScenarioOutcome outcome_from_checks(const std::string& name, std::vector<CheckResult> checks,
                                    uint64_t seed, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    ScenarioOutcome out;
    out.checks = std::move(checks);
    nlohmann::json j;
    j["schema_version"] = 1;
    j["name"] = name;
    j["seed"] = seed;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : out.checks) {
        out.pass = out.pass && c.pass;
        nlohmann::json cj;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        cj["value"] = c.value;
        cj["threshold"] = c.threshold;
        cj["detail"] = c.detail;
        for (const auto& [k, v] : c.metrics) cj["metrics"][k] = v;
        arr.push_back(cj);
        if (!c.csv_rows.empty()) {
            std::string path = out_dir + "/" + name + "_" + c.name + ".csv";
            write_csv(path, c.csv_header, c.csv_rows);
            out.artifacts.push_back(path);
        }
    }
    j["pass"] = out.pass;
    j["checks"] = arr;
    out.summary_json = j.dump(2);
    std::string spath = out_dir + "/" + name + "_summary.json";
    std::ofstream sf(spath);
    sf << out.summary_json << "\n";
    out.artifacts.push_back(spath);
    return out;
}

} // namespace

std::vector<BuiltinScenario> list_builtin_scenarios() {
    std::vector<BuiltinScenario> out;
    for (const auto& b : kBuiltins) out.push_back({b.name, b.description});
    return out;
}

bool is_builtin_scenario(const std::string& name) {
    for (const auto& b : kBuiltins)
        if (name == b.name) return true;
    return false;
}

ScenarioOutcome run_builtin_scenario(const std::string& name, uint64_t seed,
                                     const std::string& out_dir) {
    for (const auto& b : kBuiltins) {
        if (name != b.name) continue;
        if (b.text) {
            Scenario sc = Scenario::parse(b.text);
            sc.name = name;
            sc.seed = seed;
            return run_scenario(sc, out_dir);
        }
        std::vector<CheckResult> checks;
        if (name == "sphere-rho-expansion")
            checks = {check_rho_expansion()};
        else if (name == "phase-identity")
            checks = {check_phase_identity()};
        else if (name == "circle-quantize-eigen")
            checks = check_circle_eigenvalues();
        else if (name == "inverse-pair-circle") {
            for (auto& c : check_inverse_pair())
                if (c.name.find("circle") != std::string::npos) checks.push_back(std::move(c));
        } else if (name == "flat-sharp-vs-classical")
            checks = {check_flat_sharp_classical(seed)};
        else if (name == "sphere-sharp-curvature")
            checks = check_sphere_sharp_curvature();
        else if (name == "adjoint-pairing-circle")
            checks = check_adjoint_pairing();
        else if (name == "ellipticity-suite")
            checks = check_ellipticity_suite();
        return outcome_from_checks(name, std::move(checks), seed, out_dir);
    }
    throw ScenarioInvalid("unknown builtin scenario: " + name);
}

} // namespace normsym
