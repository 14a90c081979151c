#include "flagcalc/certificate.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "flagcalc/generate.hpp"

namespace flagcalc {

namespace {

size_t count_nonzero(const std::vector<Rational>& v) {
    size_t k = 0;
    for (const auto& c : v)
        if (c != 0) ++k;
    return k;
}

void write_sparse(std::ostream& os, const std::vector<Rational>& v) {
    for (size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) os << i << ' ' << rational_to_string(v[i]) << '\n';
}

struct LineReader {
    std::istream& is;
    int lineno = 0;

    bool next(std::string& out) {
        std::string raw;
        while (std::getline(is, raw)) {
            ++lineno;
            size_t a = raw.find_first_not_of(" \t\r");
            if (a == std::string::npos || raw[a] == '#') continue;
            size_t b = raw.find_last_not_of(" \t\r");
            out = raw.substr(a, b - a + 1);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error("certificate line " + std::to_string(lineno) + ": " + msg);
    }

    std::string need(const char* what) {
        std::string s;
        if (!next(s))
            throw std::runtime_error(std::string("certificate: unexpected end of file, expected ") +
                                     what);
        return s;
    }
};

// first token and the trimmed remainder of the line
std::pair<std::string, std::string> split_head(const std::string& line) {
    size_t sp = line.find_first_of(" \t");
    if (sp == std::string::npos) return {line, ""};
    size_t rest = line.find_first_not_of(" \t", sp);
    return {line.substr(0, sp), rest == std::string::npos ? "" : line.substr(rest)};
}

std::string behead(LineReader& lr, const char* kw) {
    auto [head, rest] = split_head(lr.need(kw));
    if (head != kw) lr.fail("expected '" + std::string(kw) + "', got '" + head + "'");
    return rest;
}

// sparse "<index> <rational>" lines onto the basis of size n with the given
// type; indices strictly increasing, explicit zeros rejected
AlgebraElement read_sparse(LineReader& lr, const Theory& th, unsigned n, const Flag& ftype,
                           size_t nnz, const std::string& checksum) {
    BasisPtr basis;
    try {
        basis = ftype.size() ? generate(th, n, ftype) : generate(th, n);
    } catch (const std::exception& ex) {
        lr.fail(ex.what());
    }
    if (basis->checksum() != checksum)
        lr.fail("basis checksum mismatch: file says " + checksum + ", enumeration gives " +
                basis->checksum());
    AlgebraElement e{basis, std::vector<Rational>(basis->size())};
    long long prev = -1;
    for (size_t k = 0; k < nnz; ++k) {
        std::istringstream ls(lr.need("a coefficient line"));
        long long idx = -1;
        std::string val, extra;
        if (!(ls >> idx >> val) || (ls >> extra)) lr.fail("expected '<index> <value>'");
        if (idx <= prev) lr.fail("coefficient indices must be strictly increasing");
        if (idx < 0 || idx >= static_cast<long long>(basis->size()))
            lr.fail("coefficient index out of range");
        try {
            e.coeffs[static_cast<size_t>(idx)] = parse_rational(val);
        } catch (const std::exception&) {
            lr.fail("bad rational '" + val + "'");
        }
        if (e.coeffs[static_cast<size_t>(idx)] == 0) lr.fail("explicit zero coefficient");
        prev = idx;
    }
    return e;
}

}  // namespace

void write_certificate(std::ostream& os, const Certificate& c) {
    const Theory& th = c.theory;
    os << "flagcalc certificate 1\n";
    os << "theory " << th.name() << '\n';
    for (const RelationSpec& r : th.relations())
        os << "relation " << r.name << ' ' << r.arity << ' '
           << (r.ordered ? "ordered" : "unordered") << '\n';
    os << "symmetry " << (th.symmetry() == Symmetry::Full ? "full" : "none") << '\n';
    for (const Flag& f : th.excluded()) os << "exclude " << f.literal() << '\n';
    os << "size " << c.N << '\n';
    os << "sense " << (c.maximize ? "maximize" : "minimize") << '\n';
    os << "bound " << rational_to_string(c.bound) << '\n';
    os << "basis " << generate(th, c.N)->checksum() << '\n';
    os << "target " << c.target.size() << ' ' << count_nonzero(c.target.coeffs) << ' '
       << c.target.basis->checksum() << '\n';
    write_sparse(os, c.target.coeffs);
    os << "positives " << c.positives.size() << '\n';
    for (const AlgebraElement& g : c.positives) {
        os << "positive " << g.size() << ' ' << count_nonzero(g.coeffs) << ' '
           << g.basis->checksum() << ' ' << g.basis->ftype.literal() << '\n';
        write_sparse(os, g.coeffs);
    }
    if (c.types.size() != c.q.size())
        throw std::invalid_argument("certificate type and matrix counts differ");
    os << "types " << c.types.size() << '\n';
    for (size_t t = 0; t < c.types.size(); ++t) {
        const Flag& ty = c.types[t];
        const QMat& q = c.q[t];
        size_t nnz = 0;
        for (unsigned i = 0; i < q.n; ++i)
            for (unsigned j = i; j < q.n; ++j)
                if (q.at(i, j) != 0) ++nnz;
        const unsigned m = (c.N + ty.size()) / 2;
        BasisPtr bm = ty.size() ? generate(th, m, ty) : generate(th, m);
        os << "type " << nnz << ' ' << bm->checksum() << ' ' << ty.literal() << '\n';
        for (unsigned i = 0; i < q.n; ++i)
            for (unsigned j = i; j < q.n; ++j)
                if (q.at(i, j) != 0)
                    os << i << ' ' << j << ' ' << rational_to_string(q.at(i, j)) << '\n';
    }
    os << "mus " << c.mu.size() << '\n';
    for (const Rational& v : c.mu) os << rational_to_string(v) << '\n';
    if (c.construction) os << "construction " << c.construction->literal() << '\n';
    os << "end\n";
}

Certificate read_certificate(std::istream& is) {
    LineReader lr{is};
    if (lr.need("the header") != "flagcalc certificate 1") lr.fail("unsupported header");
    std::string name = behead(lr, "theory");
    if (name.empty()) lr.fail("theory needs a name");

    std::vector<RelationSpec> specs;
    Symmetry sym = Symmetry::None;
    std::vector<std::pair<int, std::string>> excludes;
    unsigned N = 0;
    while (true) {
        auto [kw, rest] = split_head(lr.need("'size'"));
        if (kw == "relation") {
            std::istringstream ls(rest);
            RelationSpec rs;
            std::string ord, extra;
            if (!(ls >> rs.name >> rs.arity >> ord) || (ls >> extra))
                lr.fail("expected 'relation <name> <arity> <ordered|unordered>'");
            if (ord == "ordered") rs.ordered = true;
            else if (ord != "unordered") lr.fail("ordering must be 'ordered' or 'unordered'");
            specs.push_back(rs);
        } else if (kw == "symmetry") {
            if (rest == "full") sym = Symmetry::Full;
            else if (rest != "none") lr.fail("symmetry must be 'none' or 'full'");
        } else if (kw == "exclude") {
            if (rest.empty()) lr.fail("exclude needs a flag literal");
            excludes.emplace_back(lr.lineno, rest);
        } else if (kw == "size") {
            std::istringstream ls(rest);
            std::string extra;
            if (!(ls >> N) || (ls >> extra) || N == 0) lr.fail("expected 'size <n>'");
            break;
        } else {
            lr.fail("unexpected '" + kw + "' in the theory block");
        }
    }

    Certificate c;
    c.N = N;
    {
        Theory base;
        try {
            base = Theory::make(name, specs, sym);
        } catch (const std::exception& ex) {
            throw std::runtime_error(std::string("certificate theory block: ") + ex.what());
        }
        std::vector<Flag> exfl;
        for (const auto& [ln, lit] : excludes) {
            try {
                exfl.push_back(parse_flag_literal(base, lit));
            } catch (const std::exception& ex) {
                throw std::runtime_error("certificate line " + std::to_string(ln) + ": " +
                                         ex.what());
            }
        }
        try {
            c.theory = base.exclude(exfl);
        } catch (const std::exception& ex) {
            throw std::runtime_error(std::string("certificate theory block: ") + ex.what());
        }
    }

    {
        std::string sense = behead(lr, "sense");
        if (sense == "maximize") c.maximize = true;
        else if (sense == "minimize") c.maximize = false;
        else lr.fail("sense must be 'maximize' or 'minimize'");
    }
    {
        std::string val = behead(lr, "bound");
        try {
            c.bound = parse_rational(val);
        } catch (const std::exception&) {
            lr.fail("bad rational '" + val + "'");
        }
    }
    {
        std::string sum = behead(lr, "basis");
        std::string have = generate(c.theory, N)->checksum();
        if (sum != have)
            lr.fail("size-" + std::to_string(N) + " basis checksum mismatch: file says " + sum +
                    ", enumeration gives " + have);
    }
    {
        std::istringstream ls(behead(lr, "target"));
        unsigned tsz = 0;
        size_t nnz = 0;
        std::string sum, extra;
        if (!(ls >> tsz >> nnz >> sum) || (ls >> extra))
            lr.fail("expected 'target <size> <entries> <checksum>'");
        if (tsz > N) lr.fail("target larger than the certificate size");
        c.target = read_sparse(lr, c.theory, tsz, Flag(), nnz, sum);
    }
    {
        std::istringstream ls(behead(lr, "positives"));
        size_t k = 0;
        std::string extra;
        if (!(ls >> k) || (ls >> extra)) lr.fail("expected 'positives <count>'");
        for (size_t i = 0; i < k; ++i) {
            std::istringstream ps(behead(lr, "positive"));
            unsigned sz = 0;
            size_t nnz = 0;
            std::string sum;
            if (!(ps >> sz >> nnz >> sum))
                lr.fail("expected 'positive <size> <entries> <checksum> <type literal>'");
            std::string lit;
            std::getline(ps, lit);
            size_t a = lit.find_first_not_of(" \t");
            lit = a == std::string::npos ? "" : lit.substr(a);
            if (lit.empty()) lr.fail("positive needs a type literal");
            Flag ft;
            try {
                ft = parse_flag_literal(c.theory, lit);
            } catch (const std::exception& ex) {
                lr.fail(ex.what());
            }
            if (ft.type_size() != ft.size()) lr.fail("positive type literal must be fully marked");
            c.positives.push_back(read_sparse(lr, c.theory, sz, ft, nnz, sum));
        }
    }
    {
        std::istringstream ls(behead(lr, "types"));
        size_t k = 0;
        std::string extra;
        if (!(ls >> k) || (ls >> extra)) lr.fail("expected 'types <count>'");
        for (size_t t = 0; t < k; ++t) {
            std::istringstream ts(behead(lr, "type"));
            size_t nnz = 0;
            std::string sum;
            if (!(ts >> nnz >> sum)) lr.fail("expected 'type <entries> <checksum> <type literal>'");
            std::string lit;
            std::getline(ts, lit);
            size_t a = lit.find_first_not_of(" \t");
            lit = a == std::string::npos ? "" : lit.substr(a);
            if (lit.empty()) lr.fail("type needs a flag literal");
            Flag ty;
            try {
                ty = parse_flag_literal(c.theory, lit);
            } catch (const std::exception& ex) {
                lr.fail(ex.what());
            }
            if (ty.type_size() != ty.size()) lr.fail("type literal must be fully marked");
            if ((N + ty.size()) % 2 != 0 || ty.size() + 2 > N)
                lr.fail("type size does not fit the certificate size");
            const unsigned m = (N + ty.size()) / 2;
            BasisPtr bm;
            try {
                bm = ty.size() ? generate(c.theory, m, ty) : generate(c.theory, m);
            } catch (const std::exception& ex) {
                lr.fail(ex.what());
            }
            if (bm->checksum() != sum)
                lr.fail("typed basis checksum mismatch: file says " + sum +
                        ", enumeration gives " + bm->checksum());
            QMat q(static_cast<unsigned>(bm->size()));
            long long previ = -1, prevj = -1;
            for (size_t e = 0; e < nnz; ++e) {
                std::istringstream es(lr.need("a matrix entry line"));
                long long i = -1, j = -1;
                std::string val, extra2;
                if (!(es >> i >> j >> val) || (es >> extra2))
                    lr.fail("expected '<i> <j> <value>'");
                if (i < 0 || j < i || j >= static_cast<long long>(q.n))
                    lr.fail("matrix entry out of the upper triangle");
                if (i < previ || (i == previ && j <= prevj))
                    lr.fail("matrix entries must be in increasing row major order");
                Rational v;
                try {
                    v = parse_rational(val);
                } catch (const std::exception&) {
                    lr.fail("bad rational '" + val + "'");
                }
                if (v == 0) lr.fail("explicit zero entry");
                q.at(static_cast<unsigned>(i), static_cast<unsigned>(j)) = v;
                q.at(static_cast<unsigned>(j), static_cast<unsigned>(i)) = v;
                previ = i;
                prevj = j;
            }
            c.types.push_back(ty);
            c.q.push_back(std::move(q));
        }
    }
    {
        std::istringstream ls(behead(lr, "mus"));
        size_t k = 0;
        std::string extra;
        if (!(ls >> k) || (ls >> extra)) lr.fail("expected 'mus <count>'");
        for (size_t r = 0; r < k; ++r) {
            std::string val = lr.need("a multiplier line");
            try {
                c.mu.push_back(parse_rational(val));
            } catch (const std::exception&) {
                lr.fail("bad rational '" + val + "'");
            }
        }
    }
    {
        std::string line = lr.need("'construction' or 'end'");
        auto [kw, rest] = split_head(line);
        if (kw == "construction") {
            if (rest.empty()) lr.fail("construction needs a blow-up literal");
            try {
                c.construction = parse_blowup_literal(c.theory, rest);
            } catch (const std::exception& ex) {
                lr.fail(ex.what());
            }
            line = lr.need("'end'");
        }
        if (line != "end") lr.fail("expected 'end'");
    }
    std::string tail;
    if (lr.next(tail)) lr.fail("unexpected text after 'end'");
    return c;
}

VerifyReport verify_certificate(const Certificate& c, bool parallel) {
    VerifyReport rep;
    auto fail = [&rep](std::string msg) -> VerifyReport& {
        rep.ok = false;
        rep.failure = std::move(msg);
        return rep;
    };
    try {
        const Theory& th = c.theory;
        if (!th.valid()) return fail("certificate has no theory");
        if (c.N == 0) return fail("certificate size must be positive");
        BasisPtr basis_N = generate(th, c.N);
        if (basis_N->size() == 0)
            return fail("the theory has no structures of the certificate size");
        rep.notes.push_back("theory " + th.name() + ", size " + std::to_string(c.N) + ", " +
                            std::to_string(basis_N->size()) + " flags");

        if (!c.target.basis || !(c.target.basis->theory == th))
            return fail("target belongs to a different theory");
        if (c.target.ftype().size() != 0) return fail("target must be untyped");
        if (c.target.size() > c.N) return fail("target larger than the certificate size");
        if (c.types.size() != c.q.size()) return fail("type and matrix counts differ");

        for (size_t t = 0; t < c.types.size(); ++t) {
            const Flag& ty = c.types[t];
            std::string label = "type " + std::to_string(t) + " (" + ty.literal() + ")";
            if (!(ty.theory() == th)) return fail(label + " belongs to a different theory");
            if (ty.type_size() != ty.size()) return fail(label + " is not fully marked");
            if ((c.N + ty.size()) % 2 != 0 || ty.size() + 2 > c.N)
                return fail(label + " does not fit the certificate size");
            const unsigned m = (c.N + ty.size()) / 2;
            BasisPtr bm = ty.size() ? generate(th, m, ty) : generate(th, m);
            if (c.q[t].n != bm->size())
                return fail(label + ": matrix order differs from its flag basis");
            PsdCheck pc = check_psd(c.q[t]);
            if (!pc.psd) {
                rep.notes.push_back(label + ": witness value " +
                                    rational_to_string(quad_form(c.q[t], pc.witness)));
                return fail(label + " matrix is not positive semidefinite");
            }
            rep.notes.push_back(label + ": matrix of order " + std::to_string(c.q[t].n) +
                                " is positive semidefinite");
        }

        for (const AlgebraElement& g : c.positives)
            if (!g.basis || !(g.basis->theory == th))
                return fail("positivity assumption belongs to a different theory");
        std::vector<AssumptionRow> rows = assumption_rows(th, c.positives, c.N);
        if (rows.size() != c.mu.size())
            return fail("certificate carries " + std::to_string(c.mu.size()) +
                        " multipliers but the assumptions derive " + std::to_string(rows.size()) +
                        " rows");
        for (size_t r = 0; r < c.mu.size(); ++r)
            if (c.mu[r] < 0)
                return fail("multiplier " + std::to_string(r) + " is negative: " +
                            rational_to_string(c.mu[r]));
        if (!rows.empty())
            rep.notes.push_back(std::to_string(rows.size()) +
                                " assumption rows, all multipliers nonnegative");

        AlgebraElement tN = lift(c.target, c.N);
        std::vector<Rational> residual(basis_N->size());
        for (size_t h = 0; h < basis_N->size(); ++h)
            residual[h] = c.maximize ? c.bound - tN.coeffs[h] : tN.coeffs[h] - c.bound;
        for (size_t t = 0; t < c.types.size(); ++t) {
            PairTable tab = sos_table(th, c.types[t], c.N, parallel);
            const Rational den = Rational(tab.denom);
            for (size_t h = 0; h < basis_N->size(); ++h) {
                Rational acc = 0;
                for (const auto& [i, j, cnt] : tab.counts[h]) {
                    Rational w = c.q[t].at(i, j) * Rational(Integer(static_cast<long>(cnt)));
                    if (i != j) w *= 2;
                    acc += w;
                }
                if (acc != 0) residual[h] -= acc / den;
            }
        }
        for (size_t r = 0; r < rows.size(); ++r) {
            if (c.mu[r] == 0) continue;
            for (size_t h = 0; h < basis_N->size(); ++h)
                if (rows[r].row_N.coeffs[h] != 0) residual[h] -= c.mu[r] * rows[r].row_N.coeffs[h];
        }
        size_t worst = 0;
        for (size_t h = 1; h < basis_N->size(); ++h)
            if (residual[h] < residual[worst]) worst = h;
        if (residual[worst] < 0)
            return fail("the bound fails on " + basis_N->flags[worst].literal() + ": residual " +
                        rational_to_string(residual[worst]));
        rep.slack_min = residual[worst];
        rep.notes.push_back("all " + std::to_string(basis_N->size()) +
                            " residuals nonnegative, minimum " + rational_to_string(rep.slack_min) +
                            " at " + basis_N->flags[worst].literal());

        if (c.construction) {
            if (!(c.construction->theory() == th))
                return fail("construction belongs to a different theory");
            Rational v = c.construction->value(c.target);
            rep.construction_value = v;
            if (c.maximize ? v > c.bound : v < c.bound)
                return fail("construction value " + rational_to_string(v) +
                            " contradicts the bound " + rational_to_string(c.bound));
            rep.tight = (v == c.bound);
            rep.notes.push_back("construction attains " + rational_to_string(v) +
                                (rep.tight ? ", matching the bound exactly"
                                           : ", consistent with the bound"));
        }
        rep.ok = true;
        return rep;
    } catch (const std::exception& ex) {
        return fail(ex.what());
    }
}

}  // namespace flagcalc
