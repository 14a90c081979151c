#include "flagcalc/sdpa.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "flagcalc/rational.hpp"

namespace flagcalc {

namespace {

struct Quint {
    int mat, block, i, j;
    double v;
};

bool quint_less(const Quint& a, const Quint& b) {
    return std::tie(a.mat, a.block, a.i, a.j) < std::tie(b.mat, b.block, b.i, b.j);
}

void push_entries(std::vector<Quint>& q, int mat, const std::vector<SparseEntry>& ent,
                  double sign) {
    for (const auto& e : ent) {
        if (e.v == 0) continue;
        q.push_back({mat, e.block + 1, e.i + 1, e.j + 1, sign * e.v});
    }
}

// SDPA readers are whitespace tolerant; commas, braces and parentheses are
// legal separators in the block line and comment lines start with " or *.
std::string next_data_line(std::istream& is) {
    std::string line;
    while (std::getline(is, line)) {
        size_t p = line.find_first_not_of(" \t\r");
        if (p == std::string::npos) continue;
        if (line[p] == '"' || line[p] == '*') continue;
        for (char& c : line)
            if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
        return line;
    }
    throw std::runtime_error("unexpected end of SDPA file");
}

}  // namespace

SdpInstance split_free(const SdpInstance& inst) {
    if (inst.fcoef.empty()) return inst;
    if (inst.fcoef.size() != inst.A.size())
        throw std::invalid_argument("free variable coefficient count mismatch");
    SdpInstance p = inst;
    p.fcoef.clear();
    p.fcost = 0;
    const int fb = static_cast<int>(p.blocks.size());
    p.blocks.push_back(-2);
    if (inst.fcost != 0) {
        p.C.push_back({fb, 0, 0, inst.fcost});
        p.C.push_back({fb, 1, 1, -inst.fcost});
    }
    for (size_t h = 0; h < p.A.size(); ++h) {
        if (inst.fcoef[h] == 0) continue;
        p.A[h].push_back({fb, 0, 0, inst.fcoef[h]});
        p.A[h].push_back({fb, 1, 1, -inst.fcoef[h]});
    }
    return p;
}

void write_sdpa(std::ostream& os, const SdpInstance& raw) {
    if (!raw.fcoef.empty()) {
        write_sdpa(os, split_free(raw));
        return;
    }
    const SdpInstance& inst = raw;
    os << inst.A.size() << "\n";
    os << inst.blocks.size() << "\n";
    for (size_t b = 0; b < inst.blocks.size(); ++b)
        os << inst.blocks[b] << (b + 1 == inst.blocks.size() ? "\n" : " ");
    for (size_t h = 0; h < inst.b.size(); ++h)
        os << shortest_double_string(inst.b[h]) << (h + 1 == inst.b.size() ? "\n" : " ");

    std::vector<Quint> q;
    push_entries(q, 0, inst.C, -1.0);  // F_0 = -C
    for (size_t h = 0; h < inst.A.size(); ++h)
        push_entries(q, static_cast<int>(h) + 1, inst.A[h], 1.0);
    std::sort(q.begin(), q.end(), quint_less);
    for (const auto& e : q)
        os << e.mat << " " << e.block << " " << e.i << " " << e.j << " "
           << shortest_double_string(e.v) << "\n";
}

std::string sdpa_string(const SdpInstance& inst) {
    std::ostringstream os;
    write_sdpa(os, inst);
    return os.str();
}

SdpInstance read_sdpa(std::istream& is) {
    SdpInstance inst;
    size_t m, nblocks;
    {
        std::istringstream ls(next_data_line(is));
        if (!(ls >> m)) throw std::runtime_error("SDPA file: bad constraint count");
    }
    {
        std::istringstream ls(next_data_line(is));
        if (!(ls >> nblocks)) throw std::runtime_error("SDPA file: bad block count");
    }
    inst.blocks.reserve(nblocks);
    {
        std::istringstream ls(next_data_line(is));
        for (size_t b = 0; b < nblocks; ++b) {
            int s;
            if (!(ls >> s)) throw std::runtime_error("SDPA file: bad block size line");
            inst.blocks.push_back(s);
        }
    }
    inst.b.reserve(m);
    {
        std::istringstream ls(next_data_line(is));
        for (size_t h = 0; h < m; ++h) {
            double v;
            if (!(ls >> v)) throw std::runtime_error("SDPA file: bad cost vector line");
            inst.b.push_back(v);
        }
    }
    inst.A.resize(m);
    int mat, block, i, j;
    double v;
    while (is >> mat >> block >> i >> j >> v) {
        if (mat < 0 || static_cast<size_t>(mat) > m)
            throw std::runtime_error("SDPA file: matrix index out of range");
        if (block < 1 || static_cast<size_t>(block) > nblocks)
            throw std::runtime_error("SDPA file: block index out of range");
        int n = std::abs(inst.blocks[block - 1]);
        if (i < 1 || j < i || j > n) throw std::runtime_error("SDPA file: entry index out of range");
        if (inst.blocks[block - 1] < 0 && i != j)
            throw std::runtime_error("SDPA file: off-diagonal entry in diagonal block");
        if (v == 0) continue;
        SparseEntry e{block - 1, i - 1, j - 1, mat == 0 ? -v : v};
        if (mat == 0)
            inst.C.push_back(e);
        else
            inst.A[mat - 1].push_back(e);
    }
    return inst;
}

void write_sol(std::ostream& os, const SdpInstance& inst, const SdpSolution& sol) {
    if (!inst.fcoef.empty())
        throw std::invalid_argument("solution files carry split instances only");
    for (size_t h = 0; h < sol.y.size(); ++h)
        os << shortest_double_string(-sol.y[h]) << (h + 1 == sol.y.size() ? "\n" : " ");
    auto emit = [&](int mat, const std::vector<std::vector<double>>& blocks) {
        for (size_t b = 0; b < blocks.size(); ++b) {
            const int n = std::abs(inst.blocks[b]);
            const bool dense = inst.blocks[b] > 0;
            for (int i = 0; i < n; ++i)
                for (int j = i; j < (dense ? n : i + 1); ++j) {
                    double v = dense ? blocks[b][i * n + j] : blocks[b][i];
                    if (v == 0) continue;
                    os << mat << " " << b + 1 << " " << i + 1 << " " << j + 1 << " "
                       << shortest_double_string(v) << "\n";
                }
        }
    };
    emit(1, sol.Z);
    emit(2, sol.X);
}

SdpSolution read_sol(std::istream& is, const SdpInstance& inst) {
    SdpSolution sol;
    const size_t m = inst.A.size();
    sol.y.reserve(m);
    {
        std::istringstream ls(next_data_line(is));
        double v;
        while (ls >> v) sol.y.push_back(-v);
    }
    if (sol.y.size() != m) throw std::runtime_error("solution file: wrong dual vector length");
    auto shape = [&]() {
        std::vector<std::vector<double>> r(inst.blocks.size());
        for (size_t b = 0; b < inst.blocks.size(); ++b) {
            int n = std::abs(inst.blocks[b]);
            r[b].assign(inst.blocks[b] > 0 ? static_cast<size_t>(n) * n : n, 0.0);
        }
        return r;
    };
    sol.Z = shape();
    sol.X = shape();
    int mat, block, i, j;
    double v;
    while (is >> mat >> block >> i >> j >> v) {
        if (mat != 1 && mat != 2) throw std::runtime_error("solution file: bad matrix index");
        if (block < 1 || static_cast<size_t>(block) > inst.blocks.size())
            throw std::runtime_error("solution file: block index out of range");
        int n = std::abs(inst.blocks[block - 1]);
        if (i < 1 || j < i || j > n)
            throw std::runtime_error("solution file: entry index out of range");
        auto& blk = (mat == 1 ? sol.Z : sol.X)[block - 1];
        if (inst.blocks[block - 1] > 0) {
            blk[(i - 1) * n + (j - 1)] = v;
            blk[(j - 1) * n + (i - 1)] = v;
        } else {
            if (i != j) throw std::runtime_error("solution file: off-diagonal in diagonal block");
            blk[i - 1] = v;
        }
    }
    // objectives from the stored pieces: <C, X> and b . y
    for (const auto& e : inst.C) {
        double x = inst.blocks[e.block] > 0
                       ? sol.X[e.block][e.i * std::abs(inst.blocks[e.block]) + e.j]
                       : sol.X[e.block][e.i];
        sol.primal_obj += (e.i == e.j ? 1.0 : 2.0) * e.v * x;
    }
    for (size_t h = 0; h < m; ++h) sol.dual_obj += inst.b[h] * sol.y[h];
    return sol;
}

}  // namespace flagcalc
