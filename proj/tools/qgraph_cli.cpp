// qgraph: spectra, Weyl matrices and recovery checks for graph description files.
//
// Exit status: 0 ok, 1 verification failure, 2 usage or parse error, 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qgraph/qgraph.hpp"

namespace {

using namespace qgraph;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

/// 12 significant digits; values below 1e-11 in magnitude print as 0.
std::string num(double x) {
    if (std::abs(x) < 1e-11)
        x = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

struct UsageError : Error {
    using Error::Error;
};

struct WindowFlags {
    std::optional<double> lo, hi, step;
};

Window resolve_window(const GraphFile& f, const WindowFlags& flags) {
    Window w;
    if (f.window)
        w = *f.window;
    else if (!flags.lo || !flags.hi)
        throw UsageError("no [window] in the file; pass --lo and --hi");
    if (flags.lo)
        w.lo = *flags.lo;
    if (flags.hi)
        w.hi = *flags.hi;
    if (flags.step)
        w.grid_step = *flags.step;
    if (!(w.lo < w.hi))
        throw UsageError("window needs lo < hi");
    if (w.grid_step && !(*w.grid_step > 0.0))
        throw UsageError("grid step must be positive");
    return w;
}

double step_of(const GraphFile& f, const Window& w) {
    return w.grid_step ? *w.grid_step : default_grid_step(f.graph);
}

void print_warnings(const Spectrum& s) {
    for (const auto& w : s.warnings)
        std::cerr << "warning: " << w << "\n";
}

cplx parse_mu(const std::string& text) {
    const auto comma = text.find(',');
    const auto part = [](const std::string& t) {
        try {
            return detail::ExpressionParser(t, 1, 1).parse();
        } catch (const ParseError& e) {
            throw UsageError("malformed --mu '" + t + "': " + e.what());
        }
    };
    if (comma == std::string::npos)
        return {part(text), 0.0};
    return {part(text.substr(0, comma)), part(text.substr(comma + 1))};
}

int cmd_spectrum(const GraphFile& f, const WindowFlags& flags) {
    const auto w = resolve_window(f, flags);
    const auto s = find_eigenvalues(f.graph, f.alpha, w.lo, w.hi, step_of(f, w));
    print_warnings(s);
    std::cout << "lambda,multiplicity\n";
    for (const auto& e : s.entries)
        std::cout << num(e.lambda) << ',' << e.multiplicity << "\n";
    return kExitOk;
}

int cmd_weyl(const GraphFile& f, const std::string& mu_text) {
    const auto m = tw_matrix(f.graph, f.alpha, f.B, parse_mu(mu_text));
    std::cout << "row,col,re,im\n";
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i)
        for (Eigen::Index j = 0; j < m.entries.cols(); ++j)
            std::cout << i << ',' << j << ',' << num(m.entries(i, j).real()) << ','
                      << num(m.entries(i, j).imag()) << "\n";
    return kExitOk;
}

int report_errors(const ScanResult& r) {
    for (const auto& [lambda, msg] : r.errors)
        std::cerr << "error at lambda = " << num(lambda) << ": " << msg << "\n";
    return r.errors.empty() ? kExitOk : kExitNumerical;
}

int cmd_residues(const GraphFile& f, const WindowFlags& flags) {
    const auto w = resolve_window(f, flags);
    const auto r = scan_report(f.graph, f.alpha, f.B, w.lo, w.hi, step_of(f, w));
    print_warnings(r.spectrum);
    std::cout << "lambda,dim_ker,rank_res,scar_dim\n";
    for (const auto& rep : r.reports)
        std::cout << num(rep.lambda) << ',' << rep.dim_ker << ',' << rep.rank_res << ','
                  << rep.scar_dim << "\n";
    return report_errors(r);
}

int cmd_verify(const GraphFile& f, const WindowFlags& flags) {
    const auto w = resolve_window(f, flags);
    const auto r = scan_report(f.graph, f.alpha, f.B, w.lo, w.hi, step_of(f, w));
    print_warnings(r.spectrum);
    bool failed = false;
    std::cout << "lambda,dim_ker,rank_res,scar_dim,bound,identity,poles,visibility,bounds,"
                 "resonance,recovery\n";
    for (const auto& rep : r.reports) {
        failed = failed || rep.any_failure();
        std::cout << num(rep.lambda) << ',' << rep.dim_ker << ',' << rep.rank_res << ','
                  << rep.scar_dim << ',' << rep.bound << ','
                  << to_string(verdict_of(rep.rank_identity)) << ','
                  << to_string(rep.poles_are_eigenvalues) << ','
                  << to_string(rep.high_multiplicity_visible) << ','
                  << to_string(rep.multiplicity_bounds) << ',' << (rep.resonance ? "yes" : "no")
                  << ',' << to_string(rep.full_recovery) << "\n";
    }
    for (const auto& p : r.pole_sweep)
        if (p.rank > 0 && !p.matched) {
            failed = true;
            std::cerr << "FAIL: pole of rank " << p.rank << " at " << num(p.mu)
                      << " is not a located eigenvalue\n";
        }
    if (failed)
        return kExitVerifyFailed;
    return report_errors(r);
}

int cmd_scan_det(const GraphFile& f, const WindowFlags& flags, int points) {
    const auto w = resolve_window(f, flags);
    if (points < 2)
        throw UsageError("--points must be at least 2");
    // Slightly widened so the grid has exactly `points` nodes despite rounding.
    const double step = (w.hi - w.lo) / static_cast<double>(points - 1) * (1.0 + 1e-12);
    const auto scan = scan_secular(f.graph, f.alpha, w.lo, w.hi, step);
    std::cout << "lambda,det,sigma_min\n";
    for (std::size_t i = 0; i < scan.grid.size(); ++i) {
        char buf[96];
        // det and sigma_min are not snapped to zero: small values are the point of the plot.
        std::snprintf(buf, sizeof buf, "%.12g,%.12g", scan.det[i], scan.sigma_min[i]);
        std::cout << num(scan.grid[i]) << ',' << buf << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra, Weyl matrices and recovery checks for quantum graphs"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string path;
    WindowFlags flags;
    std::string mu_text;
    int points = 401;

    const auto add_common = [&](CLI::App* sub, bool window) {
        sub->add_option("file", path, "graph description file")->required();
        if (window) {
            sub->add_option("--lo", flags.lo, "lower end of the spectral window");
            sub->add_option("--hi", flags.hi, "upper end of the spectral window");
            sub->add_option("--step", flags.step, "grid step of the eigenvalue search");
        }
    };
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues with multiplicities");
    add_common(spectrum, true);
    auto* weyl = app.add_subcommand("weyl", "Weyl matrix M_B(mu)");
    add_common(weyl, false);
    weyl->add_option("--mu", mu_text, "spectral parameter RE[,IM]")->required();
    auto* residues = app.add_subcommand("residues", "residue rank and scars per eigenvalue");
    add_common(residues, true);
    auto* verify = app.add_subcommand("verify", "recovery verdicts per eigenvalue");
    add_common(verify, true);
    auto* scan_det = app.add_subcommand("scan-det", "secular determinant on a grid");
    add_common(scan_det, true);
    scan_det->add_option("--points", points, "number of grid points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        const auto f = parse_graph_file(path);
        if (spectrum->parsed())
            return cmd_spectrum(f, flags);
        if (weyl->parsed())
            return cmd_weyl(f, mu_text);
        if (residues->parsed())
            return cmd_residues(f, flags);
        if (verify->parsed())
            return cmd_verify(f, flags);
        return cmd_scan_det(f, flags, points);
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
