#include <omp.h>

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "flagcalc/certificate.hpp"
#include "flagcalc/problem.hpp"
#include "flagcalc/sdpa.hpp"

using namespace flagcalc;

// exit codes: 0 success, 1 solve/verification failure, 2 usage or parse error
namespace {

struct ParseFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string show(const Rational& r) {
    std::ostringstream os;
    os << rational_to_string(r) << "~" << std::setprecision(12) << to_double(r);
    return os.str();
}

Problem load(const std::string& path) {
    try {
        return load_problem(path);
    } catch (const std::exception& ex) {
        throw ParseFailure(ex.what());
    }
}

void require_target(const Problem& p, const std::string& path) {
    if (!p.has_target()) throw ParseFailure(path + ": no target block");
    if (p.N == 0) throw ParseFailure(path + ": settings block must set N");
    if (p.N < p.target.size())
        throw ParseFailure(path + ": N is smaller than the target size");
}

int cmd_generate(const std::string& path, int n_flag, const std::string& ftype_text,
                 bool count_only) {
    Problem p = load(path);
    unsigned n = n_flag >= 0 ? static_cast<unsigned>(n_flag) : p.N;
    if (n_flag < 0 && p.N == 0)
        throw ParseFailure("generate needs --n or an N setting in " + path);
    BasisPtr basis;
    if (ftype_text.empty()) {
        basis = generate(p.theory, n);
    } else {
        Flag ftype = parse_flag_literal(p.theory, ftype_text);
        basis = generate(p.theory, n, ftype);
    }
    if (count_only) {
        std::cout << basis->size() << "\n";
        return 0;
    }
    std::cout << basis->size() << " flags\n";
    for (const Flag& f : basis->flags) std::cout << f.render() << "\n";
    return 0;
}

int cmd_optimize(const std::string& path, const std::string& solver, int verbosity,
                 const std::string& cert_override) {
    Problem p = load(path);
    require_target(p, path);
    if (!cert_override.empty()) {
        p.certificate_path = cert_override;
        p.exact = true;
    }
    int verb = verbosity >= 0 ? verbosity : p.verbosity;
    SolveOptions opts;
    opts.solver_command = solver;
    opts.verbosity = verb;
    if (verb >= 1) {
        std::cout << "theory " << p.theory.name() << ", N = " << p.N << ", "
                  << (p.maximize ? "maximize" : "minimize") << "\n";
    }
    SdpReport rep = solve_sdp(p.theory, p.target, p.N, p.maximize, p.positives, opts);
    if (verb >= 1) {
        std::cout << rep.form.types.size() << " types, " << rep.form.basis_N->size()
                  << " flags of size " << p.N;
        if (!rep.form.rows.empty()) std::cout << ", " << rep.form.rows.size() << " assumption rows";
        std::cout << "\n";
    }
    std::cout << "numeric bound " << std::setprecision(12) << rep.bound << "\n";
    if (!p.exact) return 0;
    Certificate cert = round_certificate(rep, p.rounding, p.construction);
    VerifyReport vr = verify_certificate(cert);
    if (!vr.ok) {
        std::cerr << "exact rounding produced an invalid certificate: " << vr.failure << "\n";
        return 1;
    }
    std::cout << "exact bound " << show(cert.bound) << "\n";
    if (vr.construction_value)
        std::cout << "construction value " << show(*vr.construction_value)
                  << (vr.tight ? " (tight)" : "") << "\n";
    if (!p.certificate_path.empty()) {
        std::ofstream os(p.certificate_path);
        if (!os) throw ParseFailure("cannot open certificate output " + p.certificate_path);
        write_certificate(os, cert);
        std::cout << "certificate written to " << p.certificate_path << "\n";
    }
    return 0;
}

int cmd_export(const std::string& path, std::string out) {
    Problem p = load(path);
    require_target(p, path);
    if (out.empty()) out = p.sdpa_path;
    if (out.empty()) throw ParseFailure("export-sdp needs --out or an sdpa setting in " + path);
    SdpFormulation form = assemble(p.theory, p.target, p.N, p.maximize, p.positives);
    std::ofstream os(out);
    if (!os) throw ParseFailure("cannot open " + out);
    write_sdpa(os, form.instance);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_verify(const std::string& cert_path, const std::string& problem_path) {
    std::ifstream is(cert_path);
    if (!is) {
        std::cerr << "cannot open certificate " << cert_path << "\n";
        return 1;
    }
    Certificate cert;
    try {
        cert = read_certificate(is);
    } catch (const std::exception& ex) {
        std::cerr << cert_path << ": " << ex.what() << "\n";
        return 1;
    }
    if (!problem_path.empty()) {
        Problem p = load(problem_path);
        if (!(p.theory == cert.theory)) {
            std::cerr << "certificate theory does not match the problem: state "
                      << cert.theory.state_hash() << " vs " << p.theory.state_hash() << "\n";
            return 1;
        }
        require_target(p, problem_path);
        if (p.N != cert.N || p.maximize != cert.maximize ||
            !equal_elements(project(p.target, 0), cert.target)) {
            std::cerr << "certificate does not prove this problem's statement\n";
            return 1;
        }
        if (p.positives.size() != cert.positives.size()) {
            std::cerr << "certificate assumes a different positivity list\n";
            return 1;
        }
        for (size_t i = 0; i < p.positives.size(); ++i)
            if (!equal_elements(p.positives[i], cert.positives[i])) {
                std::cerr << "certificate assumes a different positivity list\n";
                return 1;
            }
    }
    VerifyReport vr = verify_certificate(cert);
    for (const std::string& note : vr.notes) std::cout << "  " << note << "\n";
    if (!vr.ok) {
        std::cerr << "verification failed: " << vr.failure << "\n";
        return 1;
    }
    std::cout << "verified " << (cert.maximize ? "upper" : "lower") << " bound "
              << show(cert.bound) << "\n";
    return 0;
}

int cmd_density(const std::string& path) {
    Problem p = load(path);
    if (!p.has_target()) throw ParseFailure(path + ": no target block");
    if (!p.construction) throw ParseFailure(path + ": no construction setting");
    Rational v = p.construction->value(project(p.target, 0));
    std::cout << "density " << show(v) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flag algebra calculator"};
    app.require_subcommand(1);
    int threads = 0, verbosity = -1;
    std::string solver;
    app.add_option("--threads", threads, "cap worker threads");
    app.add_option("--verbosity", verbosity, "0 results, 1 progress, 2 debug");
    app.add_option("--solver", solver, "external SDPA solver command");

    std::string path, ftype_text, out, problem_path;
    int gen_n = -1;
    bool count_only = false;

    CLI::App* gen = app.add_subcommand("generate", "list the flags of a size");
    gen->add_option("problem", path, "problem file (theory block)")->required();
    gen->add_option("--n", gen_n, "flag size (defaults to the N setting)");
    gen->add_option("--ftype", ftype_text, "type flag literal");
    gen->add_flag("--count-only", count_only, "print only the count");

    std::string cert_override;
    CLI::App* opt = app.add_subcommand("optimize", "solve the bound SDP");
    opt->add_option("problem", path, "problem file")->required();
    opt->add_option("--certificate", cert_override, "write the exact certificate here");

    CLI::App* exp = app.add_subcommand("export-sdp", "write the SDPA file, no solving");
    exp->add_option("problem", path, "problem file")->required();
    exp->add_option("--out", out, "output path (defaults to the sdpa setting)");

    CLI::App* ver = app.add_subcommand("verify", "check a certificate from scratch");
    ver->add_option("certificate", path, "certificate file")->required();
    ver->add_option("--problem", problem_path, "problem file the certificate must match");

    CLI::App* den = app.add_subcommand("density", "evaluate the target in the construction");
    den->add_option("problem", path, "problem file with a construction")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (threads > 0) omp_set_num_threads(threads);
    try {
        if (gen->parsed()) return cmd_generate(path, gen_n, ftype_text, count_only);
        if (opt->parsed()) return cmd_optimize(path, solver, verbosity, cert_override);
        if (exp->parsed()) return cmd_export(path, out);
        if (ver->parsed()) return cmd_verify(path, problem_path);
        if (den->parsed()) return cmd_density(path);
    } catch (const ParseFailure& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
}
