#include "flagcalc/flag.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <set>
#include <sstream>

namespace flagcalc {

TupleList all_tuples(unsigned n, unsigned arity, bool ordered) {
    TupleList out;
    if (arity > n) return out;
    std::vector<uint8_t> idx(arity);
    // ascending combinations; arrangements of each when ordered
    std::vector<uint8_t> comb(arity);
    for (unsigned i = 0; i < arity; ++i) comb[i] = static_cast<uint8_t>(i);
    while (true) {
        if (ordered) {
            std::vector<uint8_t> perm(comb);
            std::sort(perm.begin(), perm.end());
            do {
                Tuple t;
                t.len = static_cast<uint8_t>(arity);
                for (unsigned i = 0; i < arity; ++i) t.v[i] = perm[i];
                out.push_back(t);
            } while (std::next_permutation(perm.begin(), perm.end()));
        } else {
            Tuple t;
            t.len = static_cast<uint8_t>(arity);
            for (unsigned i = 0; i < arity; ++i) t.v[i] = comb[i];
            out.push_back(t);
        }
        // next combination
        int i = static_cast<int>(arity) - 1;
        while (i >= 0 && comb[i] == n - arity + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (unsigned j = i + 1; j < arity; ++j) comb[j] = comb[j - 1] + 1;
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void push_u16(std::string& s, size_t x) {
    s.push_back(static_cast<char>(x & 0xff));
    s.push_back(static_cast<char>((x >> 8) & 0xff));
}

template <class F>
void for_each_combination(unsigned n, unsigned k, F&& f) {
    if (k > n) return;
    std::vector<uint8_t> c(k);
    for (unsigned i = 0; i < k; ++i) c[i] = static_cast<uint8_t>(i);
    while (true) {
        if (!f(c)) return;
        int i = static_cast<int>(k) - 1;
        while (i >= 0 && c[i] == n - k + i) --i;
        if (i < 0) return;
        ++c[i];
        for (unsigned j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
    }
}

FlagCore relabel_core(const TheoryData& th, const FlagCore& core, const uint8_t* newlabel) {
    FlagCore out;
    out.n = core.n;
    out.rels.resize(core.rels.size());
    for (size_t r = 0; r < core.rels.size(); ++r) {
        TupleList& lst = out.rels[r];
        lst.reserve(core.rels[r].size());
        for (const Tuple& t : core.rels[r]) {
            Tuple m = t.mapped(newlabel);
            if (!th.relations[r].ordered) m.sort_entries();
            lst.push_back(m);
        }
        std::sort(lst.begin(), lst.end());
    }
    return out;
}

// Iterated invariant refinement. Marks keep distinct colors; unmarked vertices
// split by their relational environment. Ranks are derived from sorted
// signature strings only, so isomorphic inputs get corresponding colors.
std::vector<int> refine_colors(const TheoryData& th, const FlagCore& base, unsigned s) {
    const unsigned n = base.n;
    const bool full = th.symmetry == Symmetry::Full;
    std::vector<int> color(n);
    for (unsigned v = 0; v < n; ++v) color[v] = v < s ? static_cast<int>(v) : static_cast<int>(s);
    size_t ncolors = std::min<size_t>(n, s + 1);
    for (unsigned round = 0; round < n; ++round) {
        std::vector<std::string> sig(n);
        for (unsigned v = 0; v < n; ++v) {
            std::string& sg = sig[v];
            push_u16(sg, static_cast<size_t>(color[v]));
            std::vector<std::string> items;
            for (size_t r = 0; r < base.rels.size(); ++r) {
                const bool ordered = th.relations[r].ordered;
                for (const Tuple& t : base.rels[r]) {
                    if (!t.contains(static_cast<uint8_t>(v))) continue;
                    std::string item;
                    item.push_back(full ? '\xff' : static_cast<char>(r));
                    if (ordered) {
                        for (unsigned i = 0; i < t.len; ++i)
                            if (t.v[i] == v) item.push_back(static_cast<char>(i));
                        for (unsigned i = 0; i < t.len; ++i) push_u16(item, color[t.v[i]]);
                    } else {
                        item.push_back('\xee');
                        std::vector<int> cs;
                        for (unsigned i = 0; i < t.len; ++i)
                            if (t.v[i] != v) cs.push_back(color[t.v[i]]);
                        std::sort(cs.begin(), cs.end());
                        for (int c : cs) push_u16(item, static_cast<size_t>(c));
                    }
                    items.push_back(std::move(item));
                }
            }
            std::sort(items.begin(), items.end());
            for (const std::string& it : items) {
                sg += it;
                sg.push_back('\x00');
            }
        }
        std::vector<std::string> uniq(sig);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (unsigned v = 0; v < n; ++v)
            color[v] = static_cast<int>(
                std::lower_bound(uniq.begin(), uniq.end(), sig[v]) - uniq.begin());
        if (uniq.size() == ncolors) break;
        ncolors = uniq.size();
    }
    return color;
}

struct Search {
    const TheoryData* th = nullptr;
    const FlagCore* base = nullptr;  // relation slots already permuted
    unsigned n = 0, s = 0;
    std::vector<std::vector<uint8_t>> pos_members;  // per position index, class members
    std::vector<uint8_t> newlabel;                  // old -> new, 0xff = unplaced
    std::vector<uint8_t> placed;                    // new -> old
    std::vector<bool> used;
    std::vector<std::string> cur, best;
    std::vector<uint8_t> bestperm;
    bool have_best = false;
    uint64_t version = 0;

    std::string build_row(unsigned level, uint8_t v) {
        newlabel[v] = static_cast<uint8_t>(level);
        std::string row;
        for (size_t r = 0; r < base->rels.size(); ++r) {
            const bool ordered = th->relations[r].ordered;
            TupleList rowt;
            for (const Tuple& t : base->rels[r]) {
                if (!t.contains(v)) continue;
                bool ok = true;
                for (unsigned i = 0; i < t.len && ok; ++i)
                    if (newlabel[t.v[i]] == 0xff) ok = false;
                if (!ok) continue;
                Tuple m = t.mapped(newlabel.data());
                if (!ordered) m.sort_entries();
                rowt.push_back(m);
            }
            std::sort(rowt.begin(), rowt.end());
            push_u16(row, rowt.size());
            for (const Tuple& t : rowt)
                for (unsigned i = 0; i < t.len; ++i) row.push_back(static_cast<char>(t.v[i]));
        }
        newlabel[v] = 0xff;
        return row;
    }

    void dfs(unsigned level, bool tight) {
        if (level == n) {
            if (!have_best || !tight) {
                best = cur;
                bestperm = placed;
                have_best = true;
                ++version;
            }
            return;
        }
        std::vector<std::pair<std::string, uint8_t>> cands;
        for (uint8_t v : pos_members[level - s])
            if (!used[v]) cands.emplace_back(build_row(level, v), v);
        std::sort(cands.begin(), cands.end());
        for (auto& [row, v] : cands) {
            bool child_tight;
            if (!have_best) {
                child_tight = false;
            } else if (tight) {
                int c = row.compare(best[level - s]);
                if (c > 0) continue;
                child_tight = (c == 0);
            } else {
                child_tight = false;
            }
            used[v] = true;
            newlabel[v] = static_cast<uint8_t>(level);
            placed.push_back(v);
            cur.push_back(row);
            uint64_t ver = version;
            dfs(level + 1, child_tight);
            cur.pop_back();
            placed.pop_back();
            newlabel[v] = 0xff;
            used[v] = false;
            // A new best was completed through this node, so the current
            // prefix now matches the best prefix exactly.
            if (version != ver) tight = true;
        }
    }
};

std::string type_part(const TheoryData& th, const FlagCore& base, unsigned s) {
    std::string out;
    for (size_t r = 0; r < base.rels.size(); ++r) {
        TupleList inside;
        for (const Tuple& t : base.rels[r]) {
            bool ok = true;
            for (unsigned i = 0; i < t.len && ok; ++i)
                if (t.v[i] >= s) ok = false;
            if (ok) inside.push_back(t);
        }
        push_u16(out, inside.size());
        for (const Tuple& t : inside)
            for (unsigned i = 0; i < t.len; ++i) out.push_back(static_cast<char>(t.v[i]));
    }
    return out;
}

}  // namespace

std::string encode_core(const FlagCore& core, unsigned type_size) {
    std::string out;
    out.push_back(static_cast<char>(core.n));
    out.push_back(static_cast<char>(type_size));
    out.push_back(static_cast<char>(core.rels.size()));
    for (const TupleList& lst : core.rels) {
        push_u16(out, lst.size());
        for (const Tuple& t : lst)
            for (unsigned i = 0; i < t.len; ++i) out.push_back(static_cast<char>(t.v[i]));
    }
    return out;
}

CanonResult canonicalize_core(const TheoryData& th, const FlagCore& base, unsigned s) {
    const unsigned n = base.n;
    const size_t nrels = th.relations.size();

    std::vector<std::vector<uint8_t>> rhos;
    {
        std::vector<uint8_t> id(nrels);
        std::iota(id.begin(), id.end(), 0);
        if (th.symmetry == Symmetry::Full) {
            std::vector<uint8_t> p(id);
            do rhos.push_back(p);
            while (std::next_permutation(p.begin(), p.end()));
        } else {
            rhos.push_back(id);
        }
    }

    std::vector<int> color = refine_colors(th, base, s);
    // order unmarked classes by color, fill position blocks
    std::vector<std::vector<uint8_t>> classes;
    {
        std::vector<std::pair<int, uint8_t>> uv;
        for (unsigned v = s; v < n; ++v) uv.emplace_back(color[v], static_cast<uint8_t>(v));
        std::sort(uv.begin(), uv.end());
        for (size_t i = 0; i < uv.size();) {
            size_t j = i;
            classes.emplace_back();
            while (j < uv.size() && uv[j].first == uv[i].first)
                classes.back().push_back(uv[j++].second);
            i = j;
        }
    }

    std::string best_enc;
    FlagCore best_core;
    bool have = false;
    for (const auto& rho : rhos) {
        FlagCore b2;
        b2.n = base.n;
        b2.rels.resize(nrels);
        for (size_t j = 0; j < nrels; ++j) b2.rels[j] = base.rels[rho[j]];

        Search sr;
        sr.th = &th;
        sr.base = &b2;
        sr.n = n;
        sr.s = s;
        sr.pos_members.clear();
        for (const auto& cls : classes)
            for (size_t i = 0; i < cls.size(); ++i) sr.pos_members.push_back(cls);
        sr.newlabel.assign(n, 0xff);
        for (unsigned i = 0; i < s; ++i) sr.newlabel[i] = static_cast<uint8_t>(i);
        sr.placed.reserve(n);
        for (unsigned i = 0; i < s; ++i) sr.placed.push_back(static_cast<uint8_t>(i));
        sr.used.assign(n, false);
        for (unsigned i = 0; i < s; ++i) sr.used[i] = true;
        sr.dfs(s, true);

        std::string enc = type_part(th, b2, s);
        for (const std::string& row : sr.best) enc += row;
        if (!have || enc < best_enc) {
            have = false;  // rebuild core below
            best_enc = enc;
            std::vector<uint8_t> nl(n);
            for (unsigned i = 0; i < n; ++i) nl[sr.bestperm[i]] = static_cast<uint8_t>(i);
            best_core = relabel_core(th, b2, nl.data());
            have = true;
        }
    }
    return {best_core, encode_core(best_core, s)};
}

CanonResult canonicalize_marked(const TheoryData& th, const FlagCore& core,
                                const std::vector<int>& marks) {
    const unsigned n = core.n;
    std::vector<uint8_t> newlabel(n, 0xff);
    unsigned next = 0;
    for (int m : marks) newlabel[m] = static_cast<uint8_t>(next++);
    for (unsigned v = 0; v < n; ++v)
        if (newlabel[v] == 0xff) newlabel[v] = static_cast<uint8_t>(next++);
    FlagCore base = relabel_core(th, core, newlabel.data());
    return canonicalize_core(th, base, static_cast<unsigned>(marks.size()));
}

FlagCore induce_core(const FlagCore& core, const std::vector<uint8_t>& verts) {
    uint8_t newlabel[kMaxVertices + 1];
    std::memset(newlabel, 0xff, sizeof newlabel);
    for (size_t i = 0; i < verts.size(); ++i) newlabel[verts[i]] = static_cast<uint8_t>(i);
    FlagCore out;
    out.n = static_cast<uint8_t>(verts.size());
    out.rels.resize(core.rels.size());
    for (size_t r = 0; r < core.rels.size(); ++r) {
        for (const Tuple& t : core.rels[r]) {
            bool inside = true;
            for (unsigned i = 0; i < t.len && inside; ++i)
                if (newlabel[t.v[i]] == 0xff) inside = false;
            if (!inside) continue;
            out.rels[r].push_back(t.mapped(newlabel));
        }
        // entries of unordered tuples stay sorted only if verts is ascending;
        // callers needing canonical forms re-normalize via relabel/canonicalize
        std::sort(out.rels[r].begin(), out.rels[r].end());
    }
    return out;
}

namespace {

bool subset_induces_excluded(const TheoryData& th, const FlagCore& core, unsigned esize,
                             const std::vector<const std::string*>& keys,
                             const std::vector<uint8_t>& verts) {
    FlagCore ind = induce_core(core, verts);
    // induce_core keeps ascending order here, entries stay normalized
    std::string key = canonicalize_core(th, ind, 0).key;
    for (const std::string* k : keys)
        if (*k == key) return true;
    (void)esize;
    return false;
}

}  // namespace

bool core_contains_excluded(const TheoryData& th, const FlagCore& core) {
    for (unsigned m = 1; m <= core.n; ++m) {
        std::vector<const std::string*> keys;
        for (size_t i = 0; i < th.excluded.size(); ++i)
            if (th.excluded[i].n == m) keys.push_back(&th.excluded_keys[i]);
        if (keys.empty()) continue;
        bool found = false;
        for_each_combination(core.n, m, [&](const std::vector<uint8_t>& c) {
            if (subset_induces_excluded(th, core, m, keys, c)) {
                found = true;
                return false;
            }
            return true;
        });
        if (found) return true;
    }
    return false;
}

bool core_contains_excluded_via(const TheoryData& th, const FlagCore& core, uint8_t v) {
    for (unsigned m = 1; m <= core.n; ++m) {
        std::vector<const std::string*> keys;
        for (size_t i = 0; i < th.excluded.size(); ++i)
            if (th.excluded[i].n == m) keys.push_back(&th.excluded_keys[i]);
        if (keys.empty()) continue;
        // subsets of size m through v
        std::vector<uint8_t> others;
        for (uint8_t u = 0; u < core.n; ++u)
            if (u != v) others.push_back(u);
        bool found = false;
        for_each_combination(static_cast<unsigned>(others.size()), m - 1,
                             [&](const std::vector<uint8_t>& c) {
                                 std::vector<uint8_t> verts;
                                 verts.reserve(m);
                                 for (uint8_t i : c) verts.push_back(others[i]);
                                 verts.push_back(v);
                                 std::sort(verts.begin(), verts.end());
                                 if (subset_induces_excluded(th, core, m, keys, verts)) {
                                     found = true;
                                     return false;
                                 }
                                 return true;
                             });
        if (found) return true;
    }
    return false;
}

// ---------- Flag ----------

namespace {

std::string vertex_char(unsigned v) {
    if (v < 10) return std::string(1, static_cast<char>('0' + v));
    return std::string(1, static_cast<char>('a' + v - 10));
}

std::string tuple_text(const Tuple& t) {
    bool small = true;
    for (unsigned i = 0; i < t.len; ++i)
        if (t.v[i] >= 10) small = false;
    std::string out;
    for (unsigned i = 0; i < t.len; ++i) {
        if (!small && i) out.push_back(',');
        out += small ? vertex_char(t.v[i]) : std::to_string(t.v[i]);
    }
    return out;
}

FlagCore build_core(const Theory& th, unsigned n, const RelationInput& rels) {
    if (n > kMaxVertices) throw std::invalid_argument("too many vertices");
    const auto& specs = th.relations();
    FlagCore core;
    core.n = static_cast<uint8_t>(n);
    core.rels.resize(specs.size());
    for (const auto& [name, tuples] : rels) {
        int r = th.data()->rel_index(name);
        if (r < 0) throw std::invalid_argument("unknown relation '" + name + "'");
        const RelationSpec& spec = specs[r];
        for (const auto& tup : tuples) {
            if (tup.size() != spec.arity)
                throw std::invalid_argument("tuple arity mismatch for relation '" + name + "'");
            Tuple t;
            t.len = static_cast<uint8_t>(tup.size());
            for (size_t i = 0; i < tup.size(); ++i) {
                if (tup[i] < 0 || tup[i] >= static_cast<int>(n))
                    throw std::invalid_argument("vertex out of range in relation '" + name + "'");
                for (size_t j = 0; j < i; ++j)
                    if (tup[j] == tup[i])
                        throw std::invalid_argument("repeated vertex in tuple of relation '" +
                                                    name + "'");
                t.v[i] = static_cast<uint8_t>(tup[i]);
            }
            if (!spec.ordered) t.sort_entries();
            core.rels[r].push_back(t);
        }
    }
    for (auto& lst : core.rels) {
        std::sort(lst.begin(), lst.end());
        lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
    }
    return core;
}

std::vector<int> check_marks(unsigned n, const std::vector<int>& ftype) {
    std::vector<int> marks(ftype);
    std::vector<bool> seen(n, false);
    for (int m : marks) {
        if (m < 0 || m >= static_cast<int>(n))
            throw std::invalid_argument("ftype vertex out of range");
        if (seen[m]) throw std::invalid_argument("repeated vertex in ftype");
        seen[m] = true;
    }
    return marks;
}

}  // namespace

Flag::Flag(const Theory& th, unsigned n, const RelationInput& rels, const std::vector<int>& ftype) {
    if (!th.valid()) throw std::invalid_argument("flag needs a theory");
    FlagCore raw = build_core(th, n, rels);
    std::vector<int> marks = check_marks(n, ftype);
    CanonResult cr = canonicalize_marked(*th.data(), raw, marks);
    if (core_contains_excluded(*th.data(), cr.core))
        throw std::invalid_argument("flag contains an excluded configuration");
    th_ = th;
    core_ = std::move(cr.core);
    s_ = static_cast<unsigned>(marks.size());
    key_ = std::move(cr.key);
}

Flag Flag::from_core(const Theory& th, const FlagCore& core, const std::vector<int>& marks,
                     bool check_excluded) {
    Flag f;
    CanonResult cr = canonicalize_marked(*th.data(), core, marks);
    if (check_excluded && core_contains_excluded(*th.data(), cr.core))
        throw std::invalid_argument("flag contains an excluded configuration");
    f.th_ = th;
    f.core_ = std::move(cr.core);
    f.s_ = static_cast<unsigned>(marks.size());
    f.key_ = std::move(cr.key);
    return f;
}

Flag Flag::adopt(const Theory& th, FlagCore canonical_core, unsigned s, std::string key) {
    Flag f;
    f.th_ = th;
    f.core_ = std::move(canonical_core);
    f.s_ = s;
    f.key_ = std::move(key);
    return f;
}

Flag make_flag(const Theory& th, unsigned n, const RelationInput& rels,
               const std::vector<int>& ftype) {
    return Flag(th, n, rels, ftype);
}

Flag Flag::ftype_flag() const {
    std::vector<uint8_t> verts(s_);
    std::iota(verts.begin(), verts.end(), 0);
    FlagCore ind = induce_core(core_, verts);
    std::vector<int> marks(s_);
    std::iota(marks.begin(), marks.end(), 0);
    return from_core(th_, ind, marks, false);
}

bool Flag::same_type(const Flag& o) const {
    return s_ == o.s_ && ftype_flag().key() == o.ftype_flag().key();
}

Flag Flag::unlabeled() const { return from_core(th_, core_, {}, false); }

Flag Flag::with_ftype(const std::vector<int>& new_marks) const {
    check_marks(core_.n, new_marks);
    return from_core(th_, core_, new_marks, false);
}

std::string Flag::render() const {
    std::ostringstream os;
    os << "Flag on " << static_cast<int>(core_.n) << " points, ftype from (";
    for (unsigned i = 0; i < s_; ++i) {
        os << i;
        if (s_ == 1 || i + 1 < s_) os << (i + 1 < s_ ? ", " : ",");
    }
    os << ") with ";
    const auto& specs = th_.relations();
    for (size_t r = 0; r < specs.size(); ++r) {
        if (r) os << ", ";
        os << specs[r].name << "=(";
        for (size_t i = 0; i < core_.rels[r].size(); ++i) {
            if (i) os << ' ';
            os << tuple_text(core_.rels[r][i]);
        }
        os << ")";
    }
    return os.str();
}

std::string core_literal(const TheoryData& th, const FlagCore& core, unsigned s) {
    std::ostringstream os;
    os << "flag(" << static_cast<int>(core.n);
    for (size_t r = 0; r < th.relations.size(); ++r) {
        if (core.rels[r].empty()) continue;
        os << "; " << th.relations[r].name << " =";
        for (const Tuple& t : core.rels[r]) os << ' ' << tuple_text(t);
    }
    if (s > 0) {
        os << "; ftype =";
        for (unsigned i = 0; i < s; ++i) os << ' ' << i;
    }
    os << ")";
    return os.str();
}

std::string Flag::literal() const { return core_literal(*th_.data(), core_, s_); }

namespace {

std::vector<int> parse_tuple_token(const std::string& tok) {
    std::vector<int> out;
    if (tok.find(',') != std::string::npos) {
        std::string part;
        std::istringstream ps(tok);
        while (std::getline(ps, part, ','))
            out.push_back(std::stoi(part));
        return out;
    }
    for (char ch : tok) {
        if (ch >= '0' && ch <= '9') out.push_back(ch - '0');
        else if (ch >= 'a' && ch <= 'z') out.push_back(10 + ch - 'a');
        else throw std::invalid_argument("bad vertex character in flag literal: " + tok);
    }
    return out;
}

}  // namespace

namespace {

struct LiteralBody {
    unsigned n = 0;
    RelationInput required, forbidden;
    std::vector<int> ftype;
};

LiteralBody parse_literal_body(const std::string& text, const std::string& head,
                               bool allow_missing) {
    size_t open = text.find('('), close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open ||
        text.substr(0, open) != head)
        throw std::invalid_argument(head + " literal must look like " + head + "(...): " + text);
    std::string body = text.substr(open + 1, close - open - 1);
    std::vector<std::string> segs;
    {
        std::string seg;
        std::istringstream ss(body);
        while (std::getline(ss, seg, ';')) segs.push_back(seg);
    }
    if (segs.empty()) throw std::invalid_argument("empty " + head + " literal");
    LiteralBody out;
    {
        std::istringstream hs(segs[0]);
        int v = -1;
        if (!(hs >> v) || v < 0)
            throw std::invalid_argument("bad vertex count in " + head + " literal");
        std::string extra;
        if (hs >> extra) throw std::invalid_argument("trailing text after vertex count");
        out.n = static_cast<unsigned>(v);
    }
    for (size_t i = 1; i < segs.size(); ++i) {
        size_t eq = segs[i].find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("literal segment lacks '=': " + segs[i]);
        std::istringstream ns(segs[i].substr(0, eq));
        std::string name;
        if (!(ns >> name)) throw std::invalid_argument("unnamed segment in literal");
        std::string extra;
        if (ns >> extra) throw std::invalid_argument("bad segment name in literal: " + name);
        std::istringstream vs(segs[i].substr(eq + 1));
        if (name == "ftype") {
            if (!out.ftype.empty()) throw std::invalid_argument("ftype given twice");
            int v;
            while (vs >> v) out.ftype.push_back(v);
            if (out.ftype.empty()) throw std::invalid_argument("empty ftype list");
            continue;
        }
        RelationInput* dest = &out.required;
        if (name.size() > 8 && name.substr(name.size() - 8) == "_missing") {
            if (!allow_missing)
                throw std::invalid_argument("'" + name + "' is only valid in pattern literals");
            name.resize(name.size() - 8);
            dest = &out.forbidden;
        }
        if (dest->count(name)) throw std::invalid_argument("relation listed twice: " + name);
        TupleInput tuples;
        std::string tok;
        while (vs >> tok) tuples.push_back(parse_tuple_token(tok));
        (*dest)[name] = std::move(tuples);
    }
    return out;
}

}  // namespace

Flag parse_flag_literal(const Theory& th, const std::string& text) {
    LiteralBody b = parse_literal_body(text, "flag", false);
    return make_flag(th, b.n, b.required, b.ftype);
}

Pattern parse_pattern_literal(const Theory& th, const std::string& text) {
    LiteralBody b = parse_literal_body(text, "pattern", true);
    return Pattern(th, b.n, b.required, b.forbidden, b.ftype);
}

bool is_isomorphic(const Flag& a, const Flag& b) {
    return a.theory() == b.theory() && a == b;
}

Flag induced_subflag(const Flag& f, const std::vector<int>& vertices) {
    std::vector<bool> keep(f.size(), false);
    for (int v : vertices) {
        if (v < 0 || v >= static_cast<int>(f.size()))
            throw std::invalid_argument("vertex out of range");
        if (keep[v]) throw std::invalid_argument("repeated vertex");
        keep[v] = true;
    }
    for (unsigned m = 0; m < f.type_size(); ++m)
        if (!keep[m]) throw std::invalid_argument("induced_subflag cannot drop a marked vertex");
    // marks first (mark order = label order 0..s-1), then the rest ascending
    std::vector<uint8_t> verts;
    for (unsigned m = 0; m < f.type_size(); ++m) verts.push_back(static_cast<uint8_t>(m));
    for (int v : vertices)
        if (v >= static_cast<int>(f.type_size())) verts.push_back(static_cast<uint8_t>(v));
    std::sort(verts.begin() + f.type_size(), verts.end());
    FlagCore ind = induce_core(f.core(), verts);
    std::vector<int> marks(f.type_size());
    std::iota(marks.begin(), marks.end(), 0);
    return Flag::from_core(f.theory(), ind, marks, false);
}

bool contains_induced(const Flag& f, const Flag& e) {
    if (e.type_size() != 0) throw std::invalid_argument("contains_induced expects untyped e");
    if (e.size() > f.size()) return false;
    const TheoryData& th = *f.theory().data();
    bool found = false;
    for_each_combination(f.size(), e.size(), [&](const std::vector<uint8_t>& c) {
        FlagCore ind = induce_core(f.core(), c);
        if (canonicalize_core(th, ind, 0).key == e.key()) {
            found = true;
            return false;
        }
        return true;
    });
    return found;
}

// ---------- Pattern ----------

Pattern::Pattern(const Theory& th, unsigned n, const RelationInput& required,
                 const RelationInput& forbidden, const std::vector<int>& ftype)
    : th_(th), n_(n) {
    FlagCore req = build_core(th, n, required);
    FlagCore forb = build_core(th, n, forbidden);
    marks_ = check_marks(n, ftype);
    required_ = std::move(req.rels);
    forbidden_ = std::move(forb.rels);
    for (size_t r = 0; r < required_.size(); ++r) {
        for (const Tuple& t : required_[r])
            if (std::binary_search(forbidden_[r].begin(), forbidden_[r].end(), t))
                throw std::invalid_argument("pattern tuple both required and forbidden");
    }
}

std::vector<Flag> Pattern::compatible_flags() const {
    const TheoryData& th = *th_.data();
    const auto& specs = th.relations;
    // free tuples per slot
    std::vector<std::vector<Tuple>> free_t(specs.size());
    size_t total = 0;
    for (size_t r = 0; r < specs.size(); ++r) {
        for (const Tuple& t : all_tuples(n_, specs[r].arity, specs[r].ordered)) {
            if (std::binary_search(required_[r].begin(), required_[r].end(), t)) continue;
            if (std::binary_search(forbidden_[r].begin(), forbidden_[r].end(), t)) continue;
            free_t[r].push_back(t);
        }
        total += free_t[r].size();
    }
    if (total > 20) throw std::runtime_error("pattern expansion too large");
    std::set<std::string> seen;
    std::vector<Flag> out;
    for (uint64_t mask = 0; mask < (uint64_t{1} << total); ++mask) {
        FlagCore core;
        core.n = static_cast<uint8_t>(n_);
        core.rels.resize(specs.size());
        size_t bit = 0;
        for (size_t r = 0; r < specs.size(); ++r) {
            TupleList lst = required_[r];
            for (const Tuple& t : free_t[r])
                if (mask & (uint64_t{1} << bit++)) lst.push_back(t);
            std::sort(lst.begin(), lst.end());
            core.rels[r] = std::move(lst);
        }
        if (core_contains_excluded(th, core)) continue;
        CanonResult cr = canonicalize_marked(th, core, marks_);
        if (!seen.insert(cr.key).second) continue;
        out.push_back(Flag::from_core(th_, core, marks_, false));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool Pattern::matches(const Flag& f) const {
    if (f.size() != n_ || f.type_size() != marks_.size()) return false;
    for (const Flag& g : compatible_flags())
        if (g.key() == f.key()) return true;
    return false;
}

std::string Pattern::literal() const {
    std::ostringstream os;
    os << "pattern(" << n_;
    const auto& specs = th_.relations();
    for (size_t r = 0; r < specs.size(); ++r) {
        if (!required_[r].empty()) {
            os << "; " << specs[r].name << " =";
            for (const Tuple& t : required_[r]) os << ' ' << tuple_text(t);
        }
        if (!forbidden_[r].empty()) {
            os << "; " << specs[r].name << "_missing =";
            for (const Tuple& t : forbidden_[r]) os << ' ' << tuple_text(t);
        }
    }
    if (!marks_.empty()) {
        os << "; ftype =";
        for (int m : marks_) os << ' ' << m;
    }
    os << ")";
    return os.str();
}

}  // namespace flagcalc
