#include "flagcalc/sdp.hpp"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "flagcalc/ipm.hpp"
#include "flagcalc/sdpa.hpp"

namespace flagcalc {

std::vector<Flag> admissible_types(const Theory& th, unsigned N) {
    std::vector<Flag> out;
    if (N < 2) return out;
    for (unsigned k = N % 2; k + 2 <= N; k += 2) {
        std::map<std::string, Flag> reps;  // unlabeled structure -> smallest type
        for (const Flag& t : generate_types(th, k)) {
            std::string uk = t.unlabeled().key();
            auto it = reps.find(uk);
            if (it == reps.end())
                reps.emplace(uk, t);
            else if (t.key() < it->second.key())
                it->second = t;
        }
        for (const auto& [uk, t] : reps) {
            if (generate(th, (N + k) / 2, t)->size() == 0) continue;
            out.push_back(t);
        }
    }
    return out;
}

std::vector<AssumptionRow> assumption_rows(const Theory& th,
                                           const std::vector<AlgebraElement>& positives,
                                           unsigned N) {
    std::vector<AssumptionRow> rows;
    std::map<std::string, size_t> seen;
    for (size_t j = 0; j < positives.size(); ++j) {
        const AlgebraElement& g = positives[j];
        if (!(g.basis->theory == th))
            throw std::invalid_argument("positivity assumption theory differs");
        const unsigned s = g.ftype().size();
        if (g.size() > N) throw std::invalid_argument("positivity assumption larger than N");
        const unsigned nm = N - g.size() + s;
        for (const Flag& m : generate(th, nm, g.ftype())->flags) {
            AlgebraElement row = lift(project(multiply(g, element_of(m)), 0), N);
            bool all_zero = true;
            std::string sig;
            for (const auto& c : row.coeffs) {
                if (c != 0) all_zero = false;
                sig += rational_to_string(c);
                sig += ',';
            }
            if (all_zero) continue;
            auto [it, fresh] = seen.emplace(sig, rows.size());
            if (!fresh) continue;
            rows.push_back({j, m, std::move(row)});
        }
    }
    return rows;
}

SdpFormulation assemble(const Theory& th, const AlgebraElement& target, unsigned N, bool maximize,
                        const std::vector<AlgebraElement>& positives, bool parallel) {
    if (!(target.basis->theory == th))
        throw std::invalid_argument("target theory differs from optimization theory");
    SdpFormulation f;
    f.theory = th;
    f.N = N;
    f.maximize = maximize;
    f.basis_N = generate(th, N);
    if (f.basis_N->size() == 0) throw std::invalid_argument("theory has no structures of size N");

    f.target0 = project(target, 0);
    if (f.target0.size() > N) throw std::invalid_argument("target larger than optimization size");
    f.target_N = lift(f.target0, N);
    if (!maximize) f.target_N = scale(f.target_N, Rational(-1));

    f.positives = positives;
    f.types = admissible_types(th, N);
    f.tables.reserve(f.types.size());
    for (const Flag& t : f.types) f.tables.push_back(sos_table(th, t, N, parallel));

    f.rows = assumption_rows(th, positives, N);

    // instance layout
    SdpInstance& inst = f.instance;
    for (const PairTable& t : f.tables) inst.blocks.push_back(static_cast<int>(t.basis_m->size()));
    if (!f.rows.empty()) {
        f.mu_block = static_cast<int>(inst.blocks.size());
        inst.blocks.push_back(-static_cast<int>(f.rows.size()));
    }
    f.slack_block = static_cast<int>(inst.blocks.size());
    inst.blocks.push_back(-static_cast<int>(f.basis_N->size()));

    const size_t m = f.basis_N->size();
    inst.fcoef.assign(m, 1.0);  // the bound variable enters every constraint
    inst.fcost = 1.0;
    inst.A.resize(m);
    inst.b.resize(m);
    for (size_t h = 0; h < m; ++h) {
        auto& row = inst.A[h];
        for (size_t t = 0; t < f.tables.size(); ++t) {
            const double denom = to_double(Rational(f.tables[t].denom));
            for (const auto& [i, j, cnt] : f.tables[t].counts[h])
                row.push_back({static_cast<int>(t), i, j, -static_cast<double>(cnt) / denom});
        }
        for (size_t r = 0; r < f.rows.size(); ++r) {
            const Rational& c = f.rows[r].row_N.coeffs[h];
            if (c != 0)
                row.push_back({f.mu_block, static_cast<int>(r), static_cast<int>(r), -to_double(c)});
        }
        row.push_back({f.slack_block, static_cast<int>(h), static_cast<int>(h), -1.0});
        inst.b[h] = to_double(f.target_N.coeffs[h]);
    }
    return f;
}

namespace {

std::filesystem::path fresh_temp(const std::string& suffix) {
    static int counter = 0;
    auto dir = std::filesystem::temp_directory_path();
    std::ostringstream name;
    name << "flagcalc_" << ::getpid() << "_" << counter++ << suffix;
    return dir / name.str();
}

SdpSolution solve_external(const SdpInstance& inst, const SolveOptions& opts) {
    const SdpInstance pure = split_free(inst);
    auto in = fresh_temp(".dat-s"), out = fresh_temp(".sol");
    {
        std::ofstream os(in);
        write_sdpa(os, pure);
    }
    std::string cmd = opts.solver_command + " " + in.string() + " " + out.string();
    if (opts.verbosity < 2) cmd += " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc != 0) {
        std::filesystem::remove(in);
        throw std::runtime_error("external solver failed with exit code " +
                                 std::to_string(rc >> 8 ? rc >> 8 : rc));
    }
    std::ifstream is(out);
    if (!is) throw std::runtime_error("external solver produced no solution file");
    SdpSolution sol = read_sol(is, pure);
    if (!inst.fcoef.empty()) {
        // fold the split block back into the free variable
        sol.free_value = sol.X.back()[0] - sol.X.back()[1];
        sol.X.pop_back();
        sol.Z.pop_back();
    }
    std::filesystem::remove(in);
    std::filesystem::remove(out);
    return sol;
}

}  // namespace

SdpSolution solve_instance(const SdpInstance& inst, const SolveOptions& opts) {
    if (!opts.solver_command.empty()) return solve_external(inst, opts);
    IpmOptions io;
    io.verbosity = opts.verbosity;
    return ipm_solve(inst, io);
}

SdpReport solve_sdp(const Theory& th, const AlgebraElement& target, unsigned N, bool maximize,
                    const std::vector<AlgebraElement>& positives, const SolveOptions& opts) {
    SdpReport rep;
    rep.form = assemble(th, target, N, maximize, positives, opts.parallel);
    rep.sol = solve_instance(rep.form.instance, opts);
    double internal = rep.sol.primal_obj;
    rep.bound = maximize ? internal : -internal;
    return rep;
}

}  // namespace flagcalc
