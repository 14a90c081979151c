#include "flagcalc/blowup.hpp"

#include <algorithm>
#include <sstream>

namespace flagcalc {

namespace {

std::vector<int> normalize_pattern(const RelationSpec& spec, std::vector<int> pat, unsigned parts) {
    if (pat.size() != spec.arity)
        throw std::invalid_argument("pattern arity mismatch for relation '" + spec.name + "'");
    for (int p : pat)
        if (p < 0 || p >= static_cast<int>(parts))
            throw std::invalid_argument("part index out of range in relation '" + spec.name + "'");
    if (!spec.ordered) std::sort(pat.begin(), pat.end());
    return pat;
}

std::string pattern_str(const std::vector<int>& pat) {
    std::string s = "[";
    for (size_t i = 0; i < pat.size(); ++i) {
        if (i) s += " ";
        s += std::to_string(pat[i]);
    }
    return s + "]";
}

}  // namespace

BlowupTemplate::BlowupTemplate(const Theory& th, std::vector<Rational> weights,
                               const DetInput& det, const RandomInput& random)
    : th_(th), weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("blow-up needs at least one part");
    Rational total(0);
    for (auto& w : weights_) {
        w.canonicalize();
        if (w <= 0) throw std::invalid_argument("part weights must be positive");
        total += w;
    }
    if (total != 1) throw std::invalid_argument("part weights must sum to 1");

    const auto& rels = th_.relations();
    det_.resize(rels.size());
    random_.resize(rels.size());
    auto rel_slot = [&](const std::string& name) {
        for (size_t r = 0; r < rels.size(); ++r)
            if (rels[r].name == name) return r;
        throw std::invalid_argument("unknown relation '" + name + "' in blow-up");
    };
    for (const auto& [name, pats] : det) {
        size_t r = rel_slot(name);
        for (const auto& raw : pats) {
            auto pat = normalize_pattern(rels[r], raw, parts());
            for (const auto& seen : det_[r])
                if (seen == pat)
                    throw std::invalid_argument("pattern " + pattern_str(pat) + " listed twice");
            det_[r].push_back(std::move(pat));
        }
    }
    for (const auto& [name, pats] : random) {
        size_t r = rel_slot(name);
        for (const auto& [raw, prob_in] : pats) {
            auto pat = normalize_pattern(rels[r], raw, parts());
            Rational prob = prob_in;
            prob.canonicalize();
            if (prob < 0 || prob > 1)
                throw std::invalid_argument("random pattern probability must be in [0, 1]");
            for (const auto& seen : det_[r])
                if (seen == pat)
                    throw std::invalid_argument("pattern " + pattern_str(pat) + " listed twice");
            for (const auto& seen : random_[r])
                if (seen.pat == pat)
                    throw std::invalid_argument("pattern " + pattern_str(pat) + " listed twice");
            random_[r].push_back({std::move(pat), std::move(prob)});
        }
    }
}

BlowupTemplate BlowupTemplate::equal_parts(const Theory& th, unsigned parts, const DetInput& det,
                                           const RandomInput& random) {
    if (parts == 0) throw std::invalid_argument("blow-up needs at least one part");
    Rational w = Rational(1) / parts;
    return BlowupTemplate(th, std::vector<Rational>(parts, w), det, random);
}

AlgebraElement BlowupTemplate::element(unsigned N) const {
    BasisPtr basis = generate(th_, N);
    AlgebraElement out{basis, std::vector<Rational>(basis->size(), Rational(0))};
    const TheoryData& td = *th_.data();
    const auto& rels = th_.relations();
    const unsigned k = parts();

    struct Slot {
        size_t rel;
        Tuple t;
    };
    std::vector<Slot> slots;
    for (size_t r = 0; r < rels.size(); ++r)
        for (const Tuple& t : all_tuples(N, rels[r].arity, rels[r].ordered))
            slots.push_back({r, t});

    std::vector<unsigned> phi(N, 0);
    std::vector<int> pat;
    while (true) {
        Rational w(1);
        for (unsigned v = 0; v < N; ++v) w *= weights_[phi[v]];

        FlagCore base;
        base.n = static_cast<uint8_t>(N);
        base.rels.resize(rels.size());
        struct Live {
            size_t rel;
            Tuple t;
            Rational prob;
        };
        std::vector<Live> coins;
        for (const Slot& s : slots) {
            pat.assign(s.t.len, 0);
            for (unsigned i = 0; i < s.t.len; ++i) pat[i] = static_cast<int>(phi[s.t.v[i]]);
            if (!rels[s.rel].ordered) std::sort(pat.begin(), pat.end());
            bool placed = false;
            for (const auto& d : det_[s.rel])
                if (d == pat) {
                    base.rels[s.rel].push_back(s.t);
                    placed = true;
                    break;
                }
            if (placed) continue;
            for (const auto& rp : random_[s.rel])
                if (rp.pat == pat) {
                    if (rp.prob == 1)
                        base.rels[s.rel].push_back(s.t);
                    else if (rp.prob != 0)
                        coins.push_back({s.rel, s.t, rp.prob});
                    break;
                }
        }
        if (coins.size() > 24) throw std::runtime_error("too many random tuples in blow-up");

        for (uint64_t mask = 0; mask < (uint64_t{1} << coins.size()); ++mask) {
            FlagCore core = base;
            Rational prob = w;
            for (size_t i = 0; i < coins.size(); ++i) {
                if (mask & (uint64_t{1} << i)) {
                    core.rels[coins[i].rel].push_back(coins[i].t);
                    prob *= coins[i].prob;
                } else {
                    prob *= Rational(1) - coins[i].prob;
                }
            }
            for (auto& lst : core.rels) std::sort(lst.begin(), lst.end());
            CanonResult cr = canonicalize_core(td, core, 0);
            int idx = basis->index_of(cr.key);
            if (idx < 0)
                throw std::runtime_error("blow-up puts positive mass on excluded structure " +
                                         core_literal(td, cr.core, 0));
            out.coeffs[idx] += prob;
        }

        unsigned v = 0;
        while (v < N && ++phi[v] == k) phi[v++] = 0;
        if (v == N) break;
    }
    return out;
}

Rational BlowupTemplate::density(const Flag& f) const {
    if (!(f.theory() == th_)) throw std::invalid_argument("flag theory differs from blow-up theory");
    if (f.type_size() != 0) throw std::invalid_argument("blow-up density needs an untyped flag");
    AlgebraElement x = element(f.size());
    int idx = x.basis->index_of(f);
    if (idx < 0) throw std::logic_error("flag missing from its basis");
    return x.coeffs[idx];
}

Rational BlowupTemplate::value(const AlgebraElement& e) const {
    if (!(e.basis->theory == th_))
        throw std::invalid_argument("element theory differs from blow-up theory");
    AlgebraElement g = project(e, 0);
    return evaluate(g, element(g.size()).coeffs);
}

std::string BlowupTemplate::literal() const {
    std::ostringstream os;
    os << "blowup(parts = [";
    for (size_t i = 0; i < weights_.size(); ++i) {
        if (i) os << ", ";
        os << rational_to_string(weights_[i]);
    }
    os << "]";
    const auto& rels = th_.relations();
    for (size_t r = 0; r < rels.size(); ++r) {
        if (!det_[r].empty()) {
            os << "; " << rels[r].name << " =";
            for (const auto& pat : det_[r]) os << " " << pattern_str(pat);
        }
        if (!random_[r].empty()) {
            os << "; random " << rels[r].name << " =";
            for (const auto& rp : random_[r])
                os << " " << pattern_str(rp.pat) << ":" << rational_to_string(rp.prob);
        }
    }
    os << ")";
    return os.str();
}

namespace {

std::string trimmed(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace

BlowupTemplate parse_blowup_literal(const Theory& th, const std::string& text) {
    size_t open = text.find('('), close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open ||
        trimmed(text.substr(0, open)) != "blowup")
        throw std::invalid_argument("blow-up literal must look like blowup(...): " + text);
    std::vector<std::string> segs;
    {
        std::istringstream ss(text.substr(open + 1, close - open - 1));
        std::string seg;
        while (std::getline(ss, seg, ';')) segs.push_back(seg);
    }
    std::vector<Rational> weights;
    unsigned equal = 0;
    bool saw_parts = false;
    BlowupTemplate::DetInput det;
    BlowupTemplate::RandomInput random;
    for (const std::string& raw : segs) {
        size_t eq = raw.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("blow-up segment lacks '=': " + raw);
        std::istringstream hs(raw.substr(0, eq));
        std::string a, b, extra;
        hs >> a >> b;
        if (hs >> extra)
            throw std::invalid_argument("bad blow-up segment head: " + raw.substr(0, eq));
        std::string rhs = trimmed(raw.substr(eq + 1));
        if (a == "parts" && b.empty()) {
            if (saw_parts) throw std::invalid_argument("parts given twice");
            saw_parts = true;
            if (!rhs.empty() && rhs.front() == '[') {
                if (rhs.back() != ']') throw std::invalid_argument("unterminated part list");
                std::istringstream ls(rhs.substr(1, rhs.size() - 2));
                std::string item;
                while (std::getline(ls, item, ','))
                    weights.push_back(parse_rational(trimmed(item)));
            } else {
                size_t used = 0;
                int k = std::stoi(rhs, &used);
                if (used != rhs.size() || k <= 0)
                    throw std::invalid_argument("bad part count: " + rhs);
                equal = static_cast<unsigned>(k);
            }
            continue;
        }
        bool rnd = (a == "random");
        std::string name = rnd ? b : a;
        if (name.empty() || (!rnd && !b.empty()))
            throw std::invalid_argument("bad blow-up segment head: " + raw.substr(0, eq));
        size_t pos = 0;
        while (true) {
            size_t lb = rhs.find('[', pos);
            if (lb == std::string::npos) {
                if (!trimmed(rhs.substr(pos)).empty())
                    throw std::invalid_argument("stray text in blow-up literal: " + rhs.substr(pos));
                break;
            }
            if (!trimmed(rhs.substr(pos, lb - pos)).empty())
                throw std::invalid_argument("stray text in blow-up literal: " + rhs.substr(pos));
            size_t rb = rhs.find(']', lb);
            if (rb == std::string::npos)
                throw std::invalid_argument("unterminated tuple in blow-up literal");
            std::vector<int> pat;
            {
                std::istringstream ts(rhs.substr(lb + 1, rb - lb - 1));
                int v;
                while (ts >> v) pat.push_back(v);
                std::string rest;
                if (ts.clear(), ts >> rest)
                    throw std::invalid_argument("bad tuple in blow-up literal");
            }
            pos = rb + 1;
            if (rnd) {
                if (pos >= rhs.size() || rhs[pos] != ':')
                    throw std::invalid_argument("random pattern needs a :probability");
                size_t end = rhs.find_first_of(" \t", pos);
                std::string prob = rhs.substr(pos + 1, end == std::string::npos
                                                           ? std::string::npos
                                                           : end - pos - 1);
                random[name].push_back({pat, parse_rational(prob)});
                pos = end == std::string::npos ? rhs.size() : end;
            } else {
                det[name].push_back(pat);
            }
        }
    }
    if (!saw_parts) throw std::invalid_argument("blow-up literal lacks a parts segment");
    if (equal) return BlowupTemplate::equal_parts(th, equal, det, random);
    return BlowupTemplate(th, weights, det, random);
}

}  // namespace flagcalc
