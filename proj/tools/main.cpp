// Command-line harness for the octonionic valuation library: algebra and
// calculus verification suites, plurisubharmonicity checks, valuations of
// convex bodies, and the Radon-transform demo. Identical invocations produce
// byte-identical reports; batch reduction order is fixed, so results do not
// depend on the thread count.

#include <CLI11.hpp>
#include <json.hpp>

#include "octoval/checks.hpp"
#include "octoval/radon.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace octoval;
using nlohmann::ordered_json;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitParse = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCapability = 4;

struct Options {
    std::uint64_t seed = 1;
    std::int64_t samples = 1 << 14;
    int threads = 0;
    std::string out;
    std::string format = "json";
};

struct ResultRow {
    std::string name;
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    bool pass = true;
    double tolerance = 0.0;
    std::string detail;
};

struct Report {
    std::string command;
    Options opts;
    std::vector<ResultRow> rows;

    bool pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
};

ResultRow row_from_valuation(const std::string& name, const ValuationResult& v) {
    ResultRow r;
    r.name = name;
    r.value = v.value;
    r.std_error = v.std_error;
    r.n_samples = v.n_samples;
    r.seed = v.seed;
    r.detail = v.smoothing;
    return r;
}

void append_suite(Report& report, const checks::Suite& suite) {
    for (const auto& row : suite.rows) {
        ResultRow r;
        r.name = suite.name + "/" + row.name;
        r.value = row.value;
        r.tolerance = row.threshold;
        r.pass = row.pass;
        r.seed = report.opts.seed;
        r.detail = row.detail;
        report.rows.push_back(std::move(r));
    }
}

std::string render_json(const Report& report) {
    ordered_json j;
    j["command"] = report.command;
    j["seed"] = report.opts.seed;
    j["samples"] = report.opts.samples;
    j["pass"] = report.pass();
    ordered_json rows = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json jr;
        jr["name"] = r.name;
        jr["value"] = r.value;
        jr["std_error"] = r.std_error;
        jr["n_samples"] = r.n_samples;
        jr["seed"] = r.seed;
        jr["pass"] = r.pass;
        jr["tolerance"] = r.tolerance;
        if (!r.detail.empty()) jr["detail"] = r.detail;
        rows.push_back(std::move(jr));
    }
    j["results"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::string render_csv(const Report& report) {
    std::ostringstream os;
    os.precision(17);
    os << "command,name,value,std_error,n_samples,seed,pass,tolerance\n";
    for (const auto& r : report.rows) {
        os << report.command << ',' << r.name << ',' << r.value << ',' << r.std_error << ','
           << r.n_samples << ',' << r.seed << ',' << (r.pass ? "pass" : "fail") << ','
           << r.tolerance << '\n';
    }
    return os.str();
}

int emit(const Report& report) {
    const std::string text =
        (report.opts.format == "csv") ? render_csv(report) : render_json(report);
    if (!report.opts.out.empty()) {
        std::ofstream f(report.opts.out, std::ios::binary);
        if (!f) {
            std::cerr << "cannot open output file '" << report.opts.out << "'\n";
            return kExitParse;
        }
        f << text;
    } else {
        std::cout << text;
    }
    return report.pass() ? 0 : kExitCheckFailed;
}

std::string body_id(const std::string& path) {
    return std::filesystem::path(path).filename().string();
}

ConvexBody load_body(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open body file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return body_from_json_text(ss.str());
}

void add_common(CLI::App* cmd, Options& opts) {
    cmd->add_option("--seed", opts.seed, "random seed (always recorded in the output)");
    cmd->add_option("--samples", opts.samples, "Monte-Carlo sample count");
    cmd->add_option("--threads", opts.threads,
                    "worker threads (0 = OCTOVAL_THREADS or 1); results are identical for "
                    "any thread count");
    cmd->add_option("--out", opts.out, "write the report to this file instead of stdout");
    cmd->add_option("--format", opts.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"octoval: octonionic plurisubharmonic calculus and Spin(9)-invariant "
                 "valuations of convex bodies in R^16"};
    app.require_subcommand(1);

    Options opts;

    auto* algebra = app.add_subcommand("algebra-check", "octonion table and identity suites");
    add_common(algebra, opts);

    auto* hessian = app.add_subcommand(
        "hessian", "hermitian matrix calculus, theta/j inversion, and Hessian identity suites");
    add_common(hessian, opts);

    auto* psh = app.add_subcommand("psh-check", "sample a field's octonionic Hessian spectrum");
    add_common(psh, opts);
    std::string field_spec = "normsq";
    double psh_halfwidth = 1.0;
    double psh_tol = 1e-8;
    psh->add_option("--field", field_spec,
                    "field expression: normsq, normsq1, re-q1-conj-q2, abs, gaussian(s), "
                    "quadform(file.json), with '+' and scalar '*'");
    psh->add_option("--halfwidth", psh_halfwidth, "half-width of the sampling cube");
    psh->add_option("--tol", psh_tol, "eigenvalue tolerance");

    auto* pvol = app.add_subcommand("pseudo-volume",
                                    "integral of det of the support-function Hessian over the "
                                    "unit ball");
    add_common(pvol, opts);
    std::string body_path;
    pvol->add_option("--body", body_path, "body JSON file")->required();

    auto* psival = app.add_subcommand("psi-valuation", "weighted valuation with a bump weight");
    add_common(psival, opts);
    std::string psival_body;
    double psi_halfwidth = 0.8;
    psival->add_option("--body", psival_body, "body JSON file")->required();
    psival->add_option("--psi-halfwidth", psi_halfwidth, "half-width of the weight's box");

    auto* add = app.add_subcommand("additivity",
                                   "valuation additivity residual for overlapping box bodies");
    add_common(add, opts);
    std::string body1_path, body2_path;
    double add_beta = 128.0, add_chi = 32.0, add_tol = 0.05;
    add->add_option("--body1", body1_path, "first box polytope (default: built-in square)");
    add->add_option("--body2", body2_path, "second box polytope");
    add->add_option("--beta", add_beta, "log-sum-exp sharpness");
    add->add_option("--chi-level", add_chi, "smooth-max level");
    add->add_option("--tolerance", add_tol, "absolute smoothing allowance");

    auto* tval = app.add_subcommand("t-valuation", "mean intrinsic volume of line projections");
    add_common(tval, opts);
    std::string tval_body;
    int t_index = 8;
    tval->add_option("--body", tval_body, "body JSON file")->required();
    tval->add_option("--index", t_index, "intrinsic volume index 0..8");

    auto* uval = app.add_subcommand("u-valuation", "mean intrinsic volume of line sections");
    add_common(uval, opts);
    std::string uval_body;
    int u_index = 16;
    uval->add_option("--body", uval_body, "body JSON file")->required();
    uval->add_option("--index", u_index, "homogeneity degree 8..16");

    auto* radon = app.add_subcommand("radon-demo",
                                     "Radon transform of Gaussians and the inversion operator");
    add_common(radon, opts);

    auto* spin9cmd = app.add_subcommand("spin9-dim", "Lie closure dimensions and group checks");
    add_common(spin9cmd, opts);

    auto* report_cmd = app.add_subcommand("report", "run verification suites");
    add_common(report_cmd, opts);
    std::string suite_name = "all";
    report_cmd->add_option(
        "--suite", suite_name,
        "one of: all, algebra, hermitian, spin, calculus, tau, blocki, valuation-law, "
        "pseudo-volume, classical, radon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    Report report;
    report.opts = opts;

    try {
        if (algebra->parsed()) {
            report.command = "algebra-check";
            append_suite(report, checks::algebra_suite(opts.seed, opts.samples));
        } else if (hessian->parsed()) {
            report.command = "hessian";
            append_suite(report, checks::hermitian_suite(opts.seed));
            append_suite(report, checks::calculus_suite(opts.seed));
        } else if (psh->parsed()) {
            report.command = "psh-check";
            const ScalarField f = fields::parse(field_spec);
            const PshReport rep = is_psh(f, Box::centered_cube(psh_halfwidth),
                                         int(std::min<std::int64_t>(opts.samples, 4096)),
                                         opts.seed, psh_tol);
            ResultRow r;
            r.name = "min-hessian-eigenvalue";
            r.value = rep.min_eigenvalue;
            r.n_samples = rep.points_checked;
            r.seed = opts.seed;
            r.tolerance = psh_tol;
            r.pass = rep.pass;
            std::ostringstream w;
            w.precision(4);
            w << "worst point [";
            for (int i = 0; i < 16; ++i) w << (i ? "," : "") << rep.worst_point[i];
            w << "]";
            r.detail = w.str();
            report.rows.push_back(std::move(r));
        } else if (pvol->parsed()) {
            report.command = "pseudo-volume";
            const ConvexBody body = load_body(body_path);
            Smoothing sm;
            report.rows.push_back(row_from_valuation(
                "pseudo-volume(" + body_id(body_path) + ")",
                pseudo_volume(body, sm, opts.samples, opts.seed, opts.threads)));
        } else if (psival->parsed()) {
            report.command = "psi-valuation";
            const ConvexBody body = load_body(psival_body);
            Smoothing sm;
            const TestFunction psi =
                TestFunction::bump_in_box(Box::centered_cube(psi_halfwidth));
            report.rows.push_back(row_from_valuation(
                "psi-valuation(" + body_id(psival_body) + ")",
                psi_valuation(body, psi, sm, opts.samples, opts.seed, opts.threads)));
        } else if (add->parsed()) {
            report.command = "additivity";
            ConvexBody k1, k2;
            if (!body1_path.empty() && !body2_path.empty()) {
                k1 = load_body(body1_path);
                k2 = load_body(body2_path);
            } else {
                Polytope a, b;
                for (int s0 = 0; s0 < 2; ++s0)
                    for (int s1 = 0; s1 < 2; ++s1) {
                        Vec16 v = Vec16::Zero();
                        v[0] = s0 ? 0.125 : -0.625;
                        v[8] = s1 ? 0.5 : -0.5;
                        a.vertices.push_back(v);
                        v[0] = s0 ? 0.375 : -0.125;
                        b.vertices.push_back(v);
                    }
                k1 = a;
                k2 = b;
            }
            Smoothing sm;
            sm.beta = add_beta;
            sm.chi_level = add_chi;
            const TestFunction psi = TestFunction::bump_in_box(Box::centered_cube(0.8));
            const MeasureEstimate est =
                additivity_residual(k1, k2, psi, sm, opts.samples, opts.seed, opts.threads);
            ResultRow r;
            r.name = "additivity-residual";
            r.value = est.value;
            r.std_error = est.std_error;
            r.n_samples = est.n_samples;
            r.seed = est.seed;
            r.tolerance = 2.0 * est.std_error + add_tol;
            r.pass = std::abs(est.value) <= r.tolerance;
            report.rows.push_back(std::move(r));
        } else if (tval->parsed()) {
            report.command = "t-valuation";
            report.rows.push_back(row_from_valuation(
                "T" + std::to_string(t_index) + "(" + body_id(tval_body) + ")",
                t_valuation(load_body(tval_body), t_index, opts.samples, opts.seed)));
        } else if (uval->parsed()) {
            report.command = "u-valuation";
            const ConvexBody body = load_body(uval_body);
            ResultRow mc = row_from_valuation(
                "U" + std::to_string(u_index) + "-mc(" + body_id(uval_body) + ")",
                u_valuation(body, u_index, opts.samples, opts.seed));
            const double quad = u_valuation_quadrature(body, u_index);
            mc.tolerance = 3.0 * mc.std_error;
            mc.pass = std::abs(mc.value - quad) <= mc.tolerance;
            report.rows.push_back(mc);
            ResultRow qr;
            qr.name = "U" + std::to_string(u_index) + "-quadrature";
            qr.value = quad;
            qr.seed = opts.seed;
            report.rows.push_back(std::move(qr));
        } else if (radon->parsed()) {
            report.command = "radon-demo";
            // The pointwise 1e-3 inversion tolerance needs at least 2^17
            // lines; respect an explicit override, raise the default.
            const std::int64_t lines =
                radon->count("--samples") ? opts.samples : std::max<std::int64_t>(opts.samples, 1 << 17);
            append_suite(report, checks::radon_suite(opts.seed, lines));
        } else if (spin9cmd->parsed()) {
            report.command = "spin9-dim";
            const auto suite = checks::spin_suite(opts.seed);
            append_suite(report, suite);
            std::cout << "dim sl2(O) = " << SpinContext::instance().full_basis().size()
                      << ", dim compact = " << SpinContext::instance().compact().size() << "\n";
        } else if (report_cmd->parsed()) {
            report.command = "report";
            const std::int64_t n = opts.samples;
            auto want = [&](const char* s) { return suite_name == "all" || suite_name == s; };
            if (want("algebra")) append_suite(report, checks::algebra_suite(opts.seed, 10000));
            if (want("hermitian")) append_suite(report, checks::hermitian_suite(opts.seed));
            if (want("spin")) append_suite(report, checks::spin_suite(opts.seed));
            if (want("calculus")) append_suite(report, checks::calculus_suite(opts.seed));
            if (want("tau")) append_suite(report, checks::tau_suite(opts.seed, n, 5));
            if (want("blocki")) append_suite(report, checks::blocki_suite(opts.seed, n));
            if (want("valuation-law"))
                append_suite(report, checks::valuation_law_suite(opts.seed, n));
            if (want("pseudo-volume"))
                append_suite(report, checks::pseudo_volume_suite(opts.seed, n, ""));
            if (want("classical"))
                append_suite(report, checks::classical_valuation_suite(opts.seed, n));
            if (want("radon"))
                append_suite(report, checks::radon_suite(opts.seed, std::max<std::int64_t>(n, 1 << 17)));
            if (report.rows.empty())
                throw std::invalid_argument("unknown suite '" + suite_name + "'");
        }
    } catch (const CapabilityError& e) {
        std::cerr << "capability error: " << e.what() << "\n";
        return kExitCapability;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    }

    return emit(report);
}
